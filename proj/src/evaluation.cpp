#include "faceseg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace faceseg {

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : n_cl_(num_classes),
      counts_(static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(num_classes), 0) {}

void ConfusionMatrix::add(int truth, int predicted, std::int64_t count) {
  if (truth < 0 || predicted < 0 || truth >= n_cl_ || predicted >= n_cl_) {
    throw Error(ErrorKind::kUnknownClass, "class index outside the confusion matrix");
  }
  counts_[index(truth, predicted)] += count;
}

std::int64_t ConfusionMatrix::truth_total(int i) const {
  std::int64_t t = 0;
  for (int j = 0; j < n_cl_; ++j) t += at(i, j);
  return t;
}

std::int64_t ConfusionMatrix::predicted_total(int j) const {
  std::int64_t t = 0;
  for (int i = 0; i < n_cl_; ++i) t += at(i, j);
  return t;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (auto v : counts_) t += v;
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.n_cl_ != n_cl_) throw Error(ErrorKind::kDimensionMismatch, "class counts differ");
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
  return *this;
}

void accumulate(ConfusionMatrix& conf, const LabelMap& gt, const LabelMap& pred) {
  if (!gt.same_shape(pred)) {
    throw Error(ErrorKind::kDimensionMismatch,
                "ground truth is " + std::to_string(gt.width()) + "x" + std::to_string(gt.height()) +
                    ", prediction is " + std::to_string(pred.width()) + "x" +
                    std::to_string(pred.height()));
  }
  for (std::size_t i = 0; i < gt.size(); ++i) {
    conf.add(to_index(gt.data()[i]), to_index(pred.data()[i]));
  }
}

ConfusionMatrix confusion(const LabelMap& gt, const LabelMap& pred) {
  ConfusionMatrix conf;
  accumulate(conf, gt, pred);
  return conf;
}

MetricsReport metrics(const ConfusionMatrix& conf, AbsentClassPolicy policy) {
  const std::int64_t total = conf.total();
  if (total <= 0) throw Error(ErrorKind::kEmptyMatrix, "confusion matrix holds no pixels");
  const int n = conf.num_classes();

  MetricsReport r;
  r.class_iu.assign(static_cast<std::size_t>(n), 0.0);
  r.included.assign(static_cast<std::size_t>(n), false);

  std::int64_t correct = 0;
  double acc_sum = 0, iu_sum = 0;
  int members = 0;
  for (int i = 0; i < n; ++i) {
    const std::int64_t nii = conf.at(i, i);
    const std::int64_t ti = conf.truth_total(i);
    const std::int64_t uni = ti + conf.predicted_total(i) - nii;
    correct += nii;
    const double iu = uni > 0 ? static_cast<double>(nii) / static_cast<double>(uni) : 0.0;
    r.class_iu[static_cast<std::size_t>(i)] = iu;
    if (ti > 0) {
      r.included[static_cast<std::size_t>(i)] = true;
      acc_sum += static_cast<double>(nii) / static_cast<double>(ti);
      iu_sum += iu;
      ++members;
      r.fw_iu += static_cast<double>(ti) / static_cast<double>(total) * iu;
    } else if (policy == AbsentClassPolicy::kIncludeAsZero) {
      r.included[static_cast<std::size_t>(i)] = true;
      r.class_iu[static_cast<std::size_t>(i)] = 0.0;
      ++members;
    }
  }
  r.pixel_acc = static_cast<double>(correct) / static_cast<double>(total);
  r.mean_acc = acc_sum / members;
  r.mean_iu = iu_sum / members;
  return r;
}

double gain(const std::map<double, double>& series) {
  auto base = series.find(0.0);
  if (base == series.end()) throw Error(ErrorKind::kMissingBaseline, "series has no sigma = 0 entry");
  std::optional<double> best;
  for (const auto& [sigma, value] : series) {
    if (sigma > 0 && (!best || value > *best)) best = value;
  }
  if (!best) throw Error(ErrorKind::kMissingBaseline, "series has no sigma > 0 entry");
  return *best - base->second;
}

std::string format_fixed2(double value) {
  const double magnitude = std::floor(std::abs(value) * 100.0 + 0.5 + 1e-9);
  const bool negative = value < 0 && magnitude > 0;
  const auto cents = static_cast<long long>(magnitude);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", negative ? "-" : "", cents / 100, cents % 100);
  return buf;
}

namespace {

std::vector<std::string> ordered_tags(const ReportTable& table) {
  std::vector<std::string> tags;
  for (const auto& row : table.rows) {
    if (std::find(tags.begin(), tags.end(), row.tag) == tags.end()) tags.push_back(row.tag);
  }
  return tags;
}

std::string sigma_text(double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", sigma);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<std::optional<double>> gain_row(const ReportTable& table, const std::string& tag) {
  std::vector<std::optional<double>> out(table.columns.size());
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    std::map<double, double> series;
    for (const auto& row : table.rows) {
      if (row.tag == tag && c < row.values.size() && row.values[c]) series[row.sigma] = *row.values[c];
    }
    try {
      out[c] = gain(series);
    } catch (const Error&) {
      out[c] = std::nullopt;
    }
  }
  return out;
}

std::string emit_report(const ReportTable& table, ReportFormat format) {
  std::ostringstream out;
  const bool csv = format == ReportFormat::kCsv;
  auto cell = [](const std::optional<double>& v) { return v ? format_fixed2(*v) : std::string(); };

  if (csv) {
    out << "tag,sigma";
    for (const auto& c : table.columns) out << ',' << c;
    out << '\n';
  } else {
    out << "| tag | sigma |";
    for (const auto& c : table.columns) out << ' ' << c << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << "---|";
    out << '\n';
  }

  auto emit_row = [&](const std::string& tag, const std::string& sigma,
                      const std::vector<std::optional<double>>& values) {
    if (csv) {
      out << tag << ',' << sigma;
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out << ',' << (c < values.size() ? cell(values[c]) : std::string());
      }
    } else {
      out << "| " << tag << " | " << sigma << " |";
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const std::string v = c < values.size() ? cell(values[c]) : std::string();
        out << ' ' << (v.empty() ? "-" : v) << " |";
      }
    }
    out << '\n';
  };

  for (const auto& tag : ordered_tags(table)) {
    std::vector<const ReportRow*> rows;
    for (const auto& row : table.rows) {
      if (row.tag == tag) rows.push_back(&row);
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ReportRow* a, const ReportRow* b) { return a->sigma < b->sigma; });
    for (const ReportRow* row : rows) emit_row(tag, sigma_text(row->sigma), row->values);
    const bool has_base = std::any_of(rows.begin(), rows.end(), [](auto* r) { return r->sigma == 0; });
    const bool has_aug = std::any_of(rows.begin(), rows.end(), [](auto* r) { return r->sigma > 0; });
    if (has_base && has_aug) emit_row(tag, "Gain", gain_row(table, tag));
  }
  return out.str();
}

ReportTable metrics_table(const MetricsReport& report, const std::string& tag, double sigma) {
  ReportTable table;
  table.columns = {"Pixel Acc.", "Mean Acc.", "Mean IU", "Freq.W. IU"};
  ReportRow row{tag, sigma, {report.pixel_acc * 100, report.mean_acc * 100, report.mean_iu * 100,
                             report.fw_iu * 100}};
  for (std::size_t c = 0; c < report.class_iu.size(); ++c) {
    table.columns.push_back("IU " + std::string(class_name(static_cast<ClassId>(c))));
    if (report.included[c]) row.values.emplace_back(report.class_iu[c] * 100);
    else row.values.emplace_back(std::nullopt);
  }
  table.rows.push_back(std::move(row));
  return table;
}

ReportTable parse_report_csv(const std::string& csv) {
  ReportTable table;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) return table;
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "tag" || header[1] != "sigma") {
    throw Error(ErrorKind::kIo, "report CSV must start with tag,sigma");
  }
  table.columns.assign(header.begin() + 2, header.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() < 2 || cells[1] == "Gain") continue;
    ReportRow row{cells[0], std::stod(cells[1]), {}};
    for (std::size_t c = 2; c < header.size(); ++c) {
      if (c < cells.size() && !cells[c].empty()) row.values.emplace_back(std::stod(cells[c]));
      else row.values.emplace_back(std::nullopt);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace faceseg
