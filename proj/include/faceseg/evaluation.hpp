#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "faceseg/classes.hpp"

namespace faceseg {

// n[i][j] = pixels of true class i predicted as class j.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes = kNumClasses);

  int num_classes() const { return n_cl_; }
  std::int64_t at(int truth, int predicted) const { return counts_[index(truth, predicted)]; }
  void add(int truth, int predicted, std::int64_t count = 1);

  std::int64_t truth_total(int i) const;      // t_i
  std::int64_t predicted_total(int j) const;  // sum_i n[i][j]
  std::int64_t total() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_cl_) + static_cast<std::size_t>(j);
  }

  int n_cl_;
  std::vector<std::int64_t> counts_;
};

// Throws DimensionMismatch.
void accumulate(ConfusionMatrix& conf, const LabelMap& gt, const LabelMap& pred);
ConfusionMatrix confusion(const LabelMap& gt, const LabelMap& pred);

enum class AbsentClassPolicy {
  kExclude,      // classes with t_i == 0 are left out of mean_acc and mean_iu
  kIncludeAsZero,
};

struct MetricsReport {
  double pixel_acc = 0;
  double mean_acc = 0;
  double mean_iu = 0;
  double fw_iu = 0;
  std::vector<double> class_iu;      // 0 for classes with t_i == 0
  std::vector<bool> included;        // classes entering the means
};

// Throws EmptyMatrix when the matrix has no pixels.
MetricsReport metrics(const ConfusionMatrix& conf,
                      AbsentClassPolicy policy = AbsentClassPolicy::kExclude);

// Best value over sigma > 0 minus the sigma == 0 baseline. Throws MissingBaseline.
double gain(const std::map<double, double>& series);

// 2-decimal, half away from zero, "-0.00" normalised to "0.00".
std::string format_fixed2(double value);

struct ReportRow {
  std::string tag;
  double sigma = 0;
  std::vector<std::optional<double>> values;
};

struct ReportTable {
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;
};

enum class ReportFormat { kCsv, kMarkdown };

// Rows grouped by tag in first-appearance order, sorted by sigma, followed by a
// Gain row per tag whenever that tag has a sigma == 0 row and a sigma > 0 row.
std::string emit_report(const ReportTable& table, ReportFormat format);

// Gain per column for one tag; nullopt where the column cannot be computed.
std::vector<std::optional<double>> gain_row(const ReportTable& table, const std::string& tag);

// Global metrics and per-class IU as percentages in a single row.
ReportTable metrics_table(const MetricsReport& report, const std::string& tag, double sigma);

// Reads back the CSV produced by emit_report (Gain rows are skipped).
ReportTable parse_report_csv(const std::string& csv);

}  // namespace faceseg
