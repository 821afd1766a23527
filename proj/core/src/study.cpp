// Copyright 2026 The cacscore Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cacscore/study.hpp"

#include <cstdlib>
#include <future>
#include <thread>

#include "cacscore/dicom.hpp"
#include "cacscore/error.hpp"
#include "cacscore/provider.hpp"
#include "cacscore/raw_fixture.hpp"
#include "json_support.hpp"

namespace cacscore {

using json_support::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kIoError, "file not found: " + path.string());
  }
  const auto bytes = read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string string_field(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_string()) {
    throw Error(ErrorCode::kInvalidManifest,
                std::string("manifest field '") + key + "' must be a string");
  }
  return doc.at(key).get<std::string>();
}

StudyManifest study_from_json(const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidManifest, "study manifest must be an object");
  StudyManifest m;
  m.study_id = string_field(doc, "study_id");

  if (!doc.contains("input") || !doc.at("input").is_object()) {
    throw Error(ErrorCode::kInvalidManifest, "study '" + m.study_id + "' needs one input");
  }
  const auto& input = doc.at("input");
  const auto kind = string_field(input, "kind");
  if (kind == "raw_fixture") {
    m.input_kind = InputKind::kRawFixture;
  } else if (kind == "dicom_dir") {
    m.input_kind = InputKind::kDicomDir;
  } else {
    throw Error(ErrorCode::kInvalidManifest, "input kind must be raw_fixture or dicom_dir");
  }
  m.input_path = resolve(base, string_field(input, "path"));

  if (!doc.contains("mask") || !doc.at("mask").is_object()) {
    throw Error(ErrorCode::kInvalidManifest, "study '" + m.study_id + "' needs one mask source");
  }
  const auto& mask = doc.at("mask");
  const auto source = string_field(mask, "source");
  if (source == "file") {
    m.mask_source = MaskSourceKind::kFile;
    m.mask_path = resolve(base, string_field(mask, "path"));
  } else if (source == "threshold") {
    m.mask_source = MaskSourceKind::kThreshold;
  } else if (source == "provider") {
    m.mask_source = MaskSourceKind::kProvider;
    if (mask.contains("endpoint")) m.provider_endpoint = string_field(mask, "endpoint");
  } else {
    throw Error(ErrorCode::kInvalidManifest,
                "mask source must be file, threshold or provider");
  }

  if (doc.contains("scoring")) m.scoring = json_support::overrides_from(doc.at("scoring"));

  if (doc.contains("ground_truth")) {
    const auto& gt = doc.at("ground_truth");
    if (!gt.is_object()) throw Error(ErrorCode::kInvalidManifest, "ground_truth must be an object");
    if (gt.contains("score")) {
      if (!gt.at("score").is_number()) {
        throw Error(ErrorCode::kInvalidManifest, "ground_truth.score must be a number");
      }
      m.ground_truth.score = gt.at("score").get<double>();
    }
    if (gt.contains("category")) {
      m.ground_truth.category = parse_category(string_field(gt, "category"));
    }
    if (gt.contains("mask")) m.ground_truth.mask = resolve(base, string_field(gt, "mask"));
  }
  return m;
}

Volume load_volume(const StudyManifest& m) {
  return m.input_kind == InputKind::kRawFixture ? read_volume_files(m.input_path)
                                                : dicom::load_series(m.input_path);
}

}  // namespace

ScoringOverrides ScoringOverrides::parse_json(std::string_view text) {
  return json_support::overrides_from(json_support::parse(text, ErrorCode::kInvalidConfig));
}

ScoringConfig ScoringOverrides::apply(ScoringConfig base) const {
  if (mode) base.mode = *mode;
  if (hu_threshold) base.hu_threshold = *hu_threshold;
  if (min_component_area_mm2) base.min_component_area_mm2 = *min_component_area_mm2;
  if (thickness_normalization) base.thickness_normalization = *thickness_normalization;
  if (in_plane) base.connectivity.in_plane = *in_plane;
  if (cross_slice) base.connectivity.cross_slice = *cross_slice;
  base.validate();
  return base;
}

std::optional<RiskCategory> GroundTruth::resolved_category() const {
  if (category) return category;
  if (score) return categorize(*score);
  return std::nullopt;
}

StudyManifest StudyManifest::parse_json(std::string_view text,
                                        const std::filesystem::path& base_dir) {
  return study_from_json(json_support::parse(text), base_dir);
}

StudyManifest StudyManifest::read(const std::filesystem::path& path) {
  return parse_json(read_text(path), path.parent_path());
}

CohortManifest CohortManifest::parse_json(std::string_view text,
                                          const std::filesystem::path& base_dir) {
  const auto doc = json_support::parse(text);
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidManifest, "cohort manifest must be an object");
  CohortManifest m;
  m.cohort_id = doc.contains("cohort_id") ? string_field(doc, "cohort_id") : "cohort";
  if (doc.contains("scoring")) m.scoring = json_support::overrides_from(doc.at("scoring"));
  if (!doc.contains("studies") || !doc.at("studies").is_array()) {
    throw Error(ErrorCode::kInvalidManifest, "cohort manifest needs a studies array");
  }
  for (const auto& entry : doc.at("studies")) {
    if (entry.is_string()) {
      m.studies.push_back(StudyManifest::read(resolve(base_dir, entry.get<std::string>())));
    } else {
      m.studies.push_back(study_from_json(entry, base_dir));
    }
  }
  return m;
}

CohortManifest CohortManifest::read(const std::filesystem::path& path) {
  return parse_json(read_text(path), path.parent_path());
}

StudyResult run_study(const StudyManifest& manifest, const ScoringConfig& base_config) {
  const ScoringConfig cfg = manifest.scoring.apply(base_config);
  const Volume volume = load_volume(manifest);

  BinaryMask mask;
  switch (manifest.mask_source) {
    case MaskSourceKind::kFile:
      mask = read_mask_files(manifest.mask_path);
      break;
    case MaskSourceKind::kThreshold:
      mask = threshold_segment(volume, cfg.hu_threshold);
      break;
    case MaskSourceKind::kProvider: {
      std::string endpoint = manifest.provider_endpoint;
      if (endpoint.empty()) {
        if (const char* env = std::getenv(kProviderEnvVar)) endpoint = env;
      }
      if (endpoint.empty()) {
        throw Error(ErrorCode::kInvalidManifest,
                    "study '" + manifest.study_id + "' uses a provider but no endpoint is set (" +
                        kProviderEnvVar + ")");
      }
      mask = make_provider(endpoint)->provide(volume, {0, volume.shape().slices});
      break;
    }
  }

  StudyResult result;
  result.study_id = manifest.study_id;
  result.report = score_patient(volume, mask, cfg);
  result.ground_truth = manifest.ground_truth;
  if (manifest.ground_truth.mask) {
    auto gt_mask = read_mask_files(*manifest.ground_truth.mask);
    if (!(gt_mask.shape() == volume.shape())) {
      throw Error(ErrorCode::kShapeMismatch,
                  "ground-truth mask of study '" + manifest.study_id +
                      "' does not match the volume");
    }
    result.ground_truth_mask = std::move(gt_mask);
    result.predicted_mask = std::move(mask);
  }
  return result;
}

CohortReport evaluate_cohort(const CohortManifest& manifest,
                             const ScoringConfig& base_config, unsigned threads) {
  const ScoringConfig cfg = manifest.scoring.apply(base_config);
  CohortReport report;
  report.cohort_id = manifest.cohort_id;
  report.config = cfg;

  const std::size_t n = manifest.studies.size();
  if (n == 0) throw Error(ErrorCode::kNoGroundTruth, "cohort has no studies");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(threads, n);

  std::vector<std::optional<StudyResult>> results(n);
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        results[i] = run_study(manifest.studies[i], cfg);
      }
    }));
  }
  // Surface the first failure in manifest order once every worker is done.
  std::exception_ptr failure;
  for (auto& job : jobs) {
    try {
      job.get();
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RiskCategory> gt;
  std::vector<RiskCategory> pred;
  std::vector<OverlapCase> overlap_cases;
  for (auto& r : results) {
    report.studies.push_back(std::move(*r));
    const auto& study = report.studies.back();
    if (const auto category = study.ground_truth.resolved_category()) {
      gt.push_back(*category);
      pred.push_back(study.report.category);
    }
  }
  if (gt.empty()) {
    throw Error(ErrorCode::kNoGroundTruth, "no study in the cohort carries ground truth");
  }
  for (const auto& study : report.studies) {
    if (!study.ground_truth_mask) continue;
    for (std::size_t s = 0; s < study.ground_truth_mask->shape().slices; ++s) {
      overlap_cases.push_back({MaskPlane::of(*study.predicted_mask, s),
                               MaskPlane::of(*study.ground_truth_mask, s),
                               !study.ground_truth_mask->empty_slice(s)});
    }
  }

  report.confusion = confusion(gt, pred);
  for (std::size_t k = 0; k < 4; ++k) report.categories[k] = per_category(report.confusion, k);
  report.accuracy = accuracy(report.confusion);
  report.kappa = cohen_kappa(report.confusion);
  if (!overlap_cases.empty()) {
    try {
      report.overlap = cohort_overlap(overlap_cases);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoAnnotatedSlices) throw;
    }
  }
  if (report.confusion.n() != gt.size()) {
    throw InvariantViolation("confusion matrix count differs from labeled studies");
  }
  return report;
}

}  // namespace cacscore
