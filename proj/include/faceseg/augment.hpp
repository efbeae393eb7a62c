#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "faceseg/compositor.hpp"
#include "faceseg/planning.hpp"

namespace faceseg {

struct AugmentOptions {
  std::filesystem::path out_dir;  // empty: nothing written to disk
  unsigned workers = 1;
  bool keep_samples = false;
  double sunglasses_k = 1.0;
};

struct JobFailure {
  std::size_t job_index = 0;
  std::string face_id;
  std::string asset_id;
  std::string message;
};

struct RunReport {
  std::size_t attempted = 0;
  std::size_t succeeded = 0;
  std::vector<JobFailure> failures;
};

struct BatchResult {
  std::vector<AugmentedSample> samples;  // only when keep_samples, in job order
  std::vector<nlohmann::json> provenance;  // one per succeeded job, in job order
  RunReport report;
};

// Seed recorded for a job; derived from (global seed, face id, asset id) only.
std::uint64_t job_seed(std::uint64_t global_seed, const std::string& face_id,
                       const std::string& asset_id);

// Output stem per job: `<face>_<asset>`, with `_<n>` on repeated pairs.
std::vector<std::string> output_stems(const std::vector<AugmentJob>& jobs);

FaceSample load_face(const Manifest& manifest, const FaceRecord& record);
AssetImage load_asset(const Manifest& manifest, const AssetRecord& asset);

AugmentedSample run_job(const Manifest& manifest, const AugmentJob& job, std::uint64_t global_seed,
                        double sunglasses_k = 1.0);

nlohmann::json provenance_to_json(const Provenance& p);

// Executes every job; per-job errors are collected, not thrown. Writes
// images/<stem>.png, labels/<stem>.png and provenance.jsonl under out_dir.
BatchResult augment_batch(const AugmentationPlan& plan, const Manifest& manifest,
                          const AugmentOptions& options);

nlohmann::json report_to_json(const RunReport& report);

}  // namespace faceseg
