#include "faceseg/augment.hpp"

#include <atomic>
#include <fstream>
#include <map>
#include <optional>
#include <thread>

#include "faceseg/png_io.hpp"
#include "faceseg/rng.hpp"

namespace faceseg {
namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t job_seed(std::uint64_t global_seed, const std::string& face_id,
                       const std::string& asset_id) {
  return derive_seed(global_seed, {"job", face_id, asset_id});
}

std::vector<std::string> output_stems(const std::vector<AugmentJob>& jobs) {
  std::map<std::pair<std::string, std::string>, int> seen;
  std::vector<std::string> stems;
  stems.reserve(jobs.size());
  for (const auto& job : jobs) {
    const int n = seen[{job.face_id, job.asset_id}]++;
    std::string stem = job.face_id + "_" + job.asset_id;
    if (n > 0) stem += "_" + std::to_string(n);
    stems.push_back(std::move(stem));
  }
  return stems;
}

FaceSample load_face(const Manifest& manifest, const FaceRecord& record) {
  FaceSample face;
  face.id = record.id;
  face.landmarks = record.landmarks;
  face.image = png::load_rgb(manifest.resolve(record.image_path));
  if (!record.label_path) {
    throw Error(ErrorKind::kMissingLabels, "face '" + record.id + "' has no label map");
  }
  face.labels = load_label_map(manifest.resolve(*record.label_path));
  if (!face.image.same_shape(face.labels)) {
    throw Error(ErrorKind::kDimensionMismatch, "face '" + record.id + "' image and labels differ in size");
  }
  return face;
}

AssetImage load_asset(const Manifest& manifest, const AssetRecord& asset) {
  return {asset, png::load_rgba(manifest.resolve(asset.rgba_path))};
}

AugmentedSample run_job(const Manifest& manifest, const AugmentJob& job, std::uint64_t global_seed,
                        double sunglasses_k) {
  const FaceRecord* record = manifest.find_record(job.face_id);
  if (record == nullptr) throw Error(ErrorKind::kInvalidManifest, "unknown face '" + job.face_id + "'");
  const AssetRecord* asset = manifest.find_asset(job.asset_id);
  if (asset == nullptr) throw Error(ErrorKind::kInvalidManifest, "unknown asset '" + job.asset_id + "'");
  if (!record->landmarks) {
    throw Error(ErrorKind::kMissingLandmarks, "face '" + job.face_id + "' has no landmarks");
  }

  const FaceSample face = load_face(manifest, *record);
  const AssetImage asset_image = load_asset(manifest, *asset);
  AugmentedSample sample;
  switch (job.type) {
    case AssetKind::kSunglasses:
      sample = place_sunglasses(face, asset_image, sunglasses_k);
      break;
    case AssetKind::kMouthMask:
      sample = place_mouth_mask(face, asset_image);
      break;
    case AssetKind::kHand:
      sample = place_hand(face, asset_image, face_tone(face.image, *face.landmarks));
      break;
  }
  sample.provenance.seed = job_seed(global_seed, job.face_id, job.asset_id);
  return sample;
}

json provenance_to_json(const Provenance& p) {
  return {{"face_id", p.face_id},
          {"asset_id", p.asset_id},
          {"kind", std::string(to_string(p.kind))},
          {"placement",
           {{"scale", p.placement.scale},
            {"rotation_deg", p.placement.rotation_deg},
            {"translation", {p.placement.translation.x, p.placement.translation.y}},
            {"opacity", p.placement.opacity}}},
          {"seed", p.seed}};
}

BatchResult augment_batch(const AugmentationPlan& plan, const Manifest& manifest,
                          const AugmentOptions& options) {
  const std::size_t n = plan.jobs.size();
  const auto stems = output_stems(plan.jobs);

  struct Outcome {
    std::optional<AugmentedSample> sample;
    std::optional<json> provenance;
    std::string error;
  };
  std::vector<Outcome> outcomes(n);

  const fs::path images_dir = options.out_dir / "images";
  const fs::path labels_dir = options.out_dir / "labels";
  const bool write = !options.out_dir.empty();
  if (write) {
    fs::create_directories(images_dir);
    fs::create_directories(labels_dir);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& job = plan.jobs[i];
      try {
        AugmentedSample sample = run_job(manifest, job, plan.seed, options.sunglasses_k);
        json prov = provenance_to_json(sample.provenance);
        if (write) {
          const fs::path image_path = images_dir / (stems[i] + ".png");
          const fs::path label_path = labels_dir / (stems[i] + ".png");
          png::save_rgb(image_path, sample.image);
          save_label_map(label_path, sample.labels);
          prov["image"] = fs::relative(image_path, options.out_dir).generic_string();
          prov["labels"] = fs::relative(label_path, options.out_dir).generic_string();
        }
        outcomes[i].provenance = std::move(prov);
        if (options.keep_samples) outcomes[i].sample = std::move(sample);
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  BatchResult result;
  result.report.attempted = n;
  for (std::size_t i = 0; i < n; ++i) {
    auto& o = outcomes[i];
    if (o.provenance) {
      ++result.report.succeeded;
      result.provenance.push_back(std::move(*o.provenance));
      if (o.sample) result.samples.push_back(std::move(*o.sample));
    } else {
      result.report.failures.push_back({i, plan.jobs[i].face_id, plan.jobs[i].asset_id, o.error});
    }
  }

  if (write) {
    std::ofstream out(options.out_dir / "provenance.jsonl", std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write provenance.jsonl");
    for (const auto& p : result.provenance) out << p.dump() << '\n';
  }
  return result;
}

json report_to_json(const RunReport& report) {
  json failures = json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"job_index", f.job_index},
                        {"face_id", f.face_id},
                        {"asset_id", f.asset_id},
                        {"error", f.message}});
  }
  return {{"attempted", report.attempted},
          {"succeeded", report.succeeded},
          {"failed", report.failures.size()},
          {"failures", failures}};
}

}  // namespace faceseg
