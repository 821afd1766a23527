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

// Acceptance runner. Prints one PASS/FAIL line per criterion; detail lines
// are indented. Exit status is 0 only when every selected criterion passes.

#include <httplib.h>

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cacscore/agatston.hpp"
#include "cacscore/components.hpp"
#include "cacscore/confusion_fixture.hpp"
#include "cacscore/dicom.hpp"
#include "cacscore/error.hpp"
#include "cacscore/lesion.hpp"
#include "cacscore/metrics.hpp"
#include "cacscore/raw_fixture.hpp"
#include "cacscore/review/server.hpp"
#include "test_support.hpp"

namespace {

using namespace cacscore;
namespace t = cacscore::testing;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& detail) {
    if (!ok) pass = false;
    if (!ok || details.size() < 64) details.push_back((ok ? "ok    " : "FAIL  ") + detail);
  }
  void note(const std::string& detail) { details.push_back("note  " + detail); }
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << std::fixed << v;
  return os.str();
}

bool rel_equal(double actual, double expected, double rel = 1e-9) {
  if (expected == 0.0) return actual == 0.0;
  return std::abs(actual - expected) <= rel * std::abs(expected);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// =============================================================================
// Table reproduction
// =============================================================================

struct TableContext {
  std::filesystem::path fixtures;
};

std::vector<TableReproduction> reproduce_all(const std::filesystem::path& dir) {
  std::vector<TableReproduction> out;
  for (const auto& fixture : load_fixture_set(dir)) out.push_back(reproduce(fixture));
  return out;
}

Outcome tables_accuracy_kappa(const TableContext& ctx) {
  Outcome o;
  for (const auto& table : reproduce_all(ctx.fixtures)) {
    for (const auto& [label, cmp] :
         {std::pair{"accuracy", table.accuracy}, std::pair{"kappa", table.kappa}}) {
      if (!cmp.reported) continue;
      const double delta = *cmp.delta();
      o.check(std::abs(delta) <= 0.005 + 1e-12,
              table.name + " " + label + " " + fmt(cmp.recomputed, 4) + " vs " +
                  fmt(*cmp.reported, 3) + " (delta " + fmt(delta, 4) + ", tol 0.005)");
    }
  }
  return o;
}

Outcome tables_sensitivity_ppv(const TableContext& ctx) {
  Outcome o;
  for (const auto& table : reproduce_all(ctx.fixtures)) {
    for (const char* metric : {"sensitivity", "ppv"}) {
      const auto it = table.per_category.find(metric);
      if (it == table.per_category.end()) continue;
      for (std::size_t k = 0; k < 4; ++k) {
        const auto& cmp = it->second[k];
        if (!cmp.reported) continue;
        const double delta = *cmp.delta();
        const bool ok = std::abs(delta) <= 0.01 + 1e-12;
        if (ok) continue;
        o.check(false, table.name + " " + std::string(to_string(kAllCategories[k])) + " " +
                           metric + " " + fmt(cmp.recomputed, 4) + " vs " +
                           fmt(*cmp.reported, 2) + " (delta " + fmt(delta, 4) +
                           ", tol 0.01)");
      }
    }
  }
  if (o.pass) o.check(true, "every reported sensitivity and PPV cell within 0.01");
  return o;
}

Outcome tables_oracle_exact(const TableContext& ctx) {
  Outcome o;
  std::size_t cells = 0;
  for (const auto& table : reproduce_all(ctx.fixtures)) {
    std::vector<int> truth, pred;
    t::expand_matrix(table.matrix.counts, truth, pred);
    const auto oracle = t::brute_force_metrics(truth, pred);
    o.check(table.accuracy.recomputed == oracle.accuracy &&
                std::abs(table.kappa.recomputed - oracle.kappa) <= 1e-12,
            table.name + " accuracy/kappa agree with brute force");
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& m = table.categories[k];
      const auto& ref = oracle.categories[k];
      const bool ok = m.specificity == ref.specificity && m.npv == ref.npv &&
                      std::abs(m.f1 - ref.f1) <= 1e-12 && m.sensitivity == ref.sensitivity &&
                      m.ppv == ref.ppv;
      ++cells;
      if (!ok) {
        o.check(false, table.name + " " + std::string(to_string(kAllCategories[k])) +
                           " differs from brute force");
      }
      for (const char* metric : {"specificity", "npv", "f1"}) {
        const auto it = table.per_category.find(metric);
        if (it == table.per_category.end() || !it->second[k].reported) continue;
        const double delta = *it->second[k].delta();
        if (std::abs(delta) > 0.005) {
          o.note(table.name + " " + std::string(to_string(kAllCategories[k])) + " " + metric +
                 " delta vs reported " + fmt(delta, 4) + " (recorded)");
        }
      }
    }
  }
  if (o.pass) o.check(true, std::to_string(cells) + " category rows match the oracle");
  return o;
}

Outcome tables_runtime(const TableContext& ctx) {
  Outcome o;
  const auto start = Clock::now();
  const auto tables = reproduce_all(ctx.fixtures);
  std::size_t rendered = 0;
  for (const auto& table : tables) rendered += render_table(table).size();
  const double elapsed = seconds_since(start);
  o.check(!tables.empty() && rendered > 0 && elapsed < 1.0,
          std::to_string(tables.size()) + " fixtures in " + fmt(elapsed, 4) + " s (limit 1 s)");
  return o;
}

// =============================================================================
// Connected components
// =============================================================================

struct ComponentTiming {
  double seconds = 0.0;
};

bool labels_match(const BinaryMask& mask, Connectivity conn) {
  const auto grid = label_components(mask, conn);
  const bool eight = conn.in_plane == InPlaneConnectivity::kEight;
  const int cross = static_cast<int>(conn.cross_slice);
  const auto oracle = t::flood_fill_labels(
      std::vector<std::uint8_t>(mask.values().begin(), mask.values().end()), mask.shape().slices,
      mask.shape().rows, mask.shape().cols, eight, cross);
  return grid.labels == oracle;
}

Outcome components_exhaustive(ComponentTiming& timing) {
  Outcome o;
  const auto start = Clock::now();
  for (const auto in_plane : {InPlaneConnectivity::kFour, InPlaneConnectivity::kEight}) {
    const Connectivity conn{in_plane, CrossSliceConnectivity::kNone};
    std::size_t mismatches = 0;
    for (std::uint32_t bits = 0; bits < (1u << 16); ++bits) {
      BinaryMask mask(Shape{1, 4, 4});
      for (std::size_t i = 0; i < 16; ++i) {
        if (bits & (1u << i)) mask.set(0, i / 4, i % 4, true);
      }
      if (!labels_match(mask, conn)) ++mismatches;
    }
    o.check(mismatches == 0, "65536 4x4 masks, " + std::string(to_string(in_plane)) +
                                 "-connected: " + std::to_string(mismatches) + " mismatches");
  }
  timing.seconds += seconds_since(start);
  return o;
}

Outcome components_random(ComponentTiming& timing) {
  Outcome o;
  const auto start = Clock::now();
  for (const auto& [label, conn] :
       {std::pair{"6", Connectivity{InPlaneConnectivity::kFour, CrossSliceConnectivity::kFace}},
        std::pair{"26",
                  Connectivity{InPlaneConnectivity::kEight, CrossSliceConnectivity::kFull}}}) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> density(0.05, 0.7);
    std::size_t mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
      if (!labels_match(t::random_mask(Shape{8, 8, 8}, density(rng), rng), conn)) ++mismatches;
    }
    o.check(mismatches == 0, "1000 random 8x8x8 masks, " + std::string(label) +
                                 "-neighbourhood: " + std::to_string(mismatches) + " mismatches");
  }
  timing.seconds += seconds_since(start);
  return o;
}

Outcome components_runtime() {
  Outcome o;
  ComponentTiming timing;
  const bool ok = components_exhaustive(timing).pass && components_random(timing).pass;
  o.check(ok && timing.seconds < 10.0,
          "both oracle sweeps in " + fmt(timing.seconds, 3) + " s (limit 10 s)");
  return o;
}

// =============================================================================
// Agatston phantoms
// =============================================================================

ScoringConfig mode_config(ScoringMode mode) {
  ScoringConfig cfg;
  cfg.mode = mode;
  return cfg;
}

Outcome phantom_eight_voxel() {
  Outcome o;
  const auto volume = t::eight_voxel_volume();
  const auto mask = threshold_segment(volume, kDefaultHuThreshold);
  for (const auto mode : {ScoringMode::kLesionSpecific, ScoringMode::kClassicSlicewise}) {
    const double score = score_patient(volume, mask, mode_config(mode)).total_score;
    o.check(rel_equal(score, 7.84), std::string(to_string(mode)) + " " + fmt(score, 12) +
                                        " (expected 7.84)");
  }
  return o;
}

Outcome phantom_mixed_hu() {
  Outcome o;
  const auto volume = t::two_lesion_volume();
  const auto full = t::two_lesion_mask();
  const auto a = t::lesion_a_mask();
  std::vector<std::uint8_t> values(full.values().begin(), full.values().end());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] &= static_cast<std::uint8_t>(!a.values()[i]);
  const BinaryMask lesion_b(full.shape(), values);
  const double specific =
      score_patient(volume, lesion_b, mode_config(ScoringMode::kLesionSpecific)).total_score;
  const double classic =
      score_patient(volume, lesion_b, mode_config(ScoringMode::kClassicSlicewise)).total_score;
  o.check(rel_equal(specific, 20.0), "lesion-specific " + fmt(specific, 12) + " (expected 20.0)");
  o.check(rel_equal(classic, 14.0), "classic " + fmt(classic, 12) + " (expected 14.0)");
  return o;
}

Outcome phantom_sub_area() {
  Outcome o;
  std::vector<std::int16_t> hu(64, -1000);
  for (const std::size_t i : {9u, 10u, 17u}) hu[i] = 500;
  const Volume volume(Shape{1, 8, 8}, Spacing{3.0, 0.5, 0.5}, hu);
  const auto mask = threshold_segment(volume, kDefaultHuThreshold);
  for (const auto mode : {ScoringMode::kLesionSpecific, ScoringMode::kClassicSlicewise}) {
    const auto report = score_patient(volume, mask, mode_config(mode));
    o.check(report.total_score == 0.0 && report.per_lesion.empty(),
            std::string(to_string(mode)) + " 0.75 mm2 focus scores " + fmt(report.total_score));
  }
  return o;
}

Outcome phantom_sub_threshold() {
  Outcome o;
  std::vector<std::int16_t> hu(64, -1000);
  BinaryMask mask(Shape{1, 8, 8});
  for (std::size_t r = 1; r < 7; ++r) {
    for (std::size_t c = 1; c < 7; ++c) {
      hu[r * 8 + c] = 129;
      mask.set(0, r, c, true);
    }
  }
  const Volume volume(Shape{1, 8, 8}, Spacing{3.0, 1.0, 1.0}, hu);
  for (const auto mode : {ScoringMode::kLesionSpecific, ScoringMode::kClassicSlicewise}) {
    const double score = score_patient(volume, mask, mode_config(mode)).total_score;
    o.check(score == 0.0, std::string(to_string(mode)) + " 36 mm2 at 129 HU scores " + fmt(score));
  }
  return o;
}

Outcome phantom_categories() {
  Outcome o;
  const std::array<std::pair<double, RiskCategory>, 6> cases{{{10.0, RiskCategory::k0To10},
                                                              {10.5, RiskCategory::k11To100},
                                                              {100.0, RiskCategory::k11To100},
                                                              {400.0, RiskCategory::k101To400},
                                                              {400.1, RiskCategory::k400Plus},
                                                              {0.0, RiskCategory::k0To10}}};
  for (const auto& [score, expected] : cases) {
    const auto got = categorize(score);
    o.check(got == expected, fmt(score, 1) + " -> " + std::string(to_string(got)));
  }
  return o;
}

// =============================================================================
// Properties
// =============================================================================

Outcome property_monotonicity() {
  Outcome o;
  std::mt19937_64 rng(11);
  const auto volume = t::random_volume(Shape{4, 12, 12}, Spacing{3.0, 0.6, 0.6}, rng);
  std::uniform_int_distribution<long> s(0, 3), rc(0, 11);
  for (const auto mode : {ScoringMode::kLesionSpecific, ScoringMode::kClassicSlicewise}) {
    BinaryMask mask(volume.shape());
    double previous = 0.0;
    std::size_t violations = 0;
    for (int step = 0; step < 500; ++step) {
      mask.set(s(rng), rc(rng), rc(rng), true);
      const double score = score_patient(volume, mask, mode_config(mode)).total_score;
      if (score < previous - 1e-9 * std::max(1.0, previous)) ++violations;
      previous = score;
    }
    o.check(violations == 0, std::string(to_string(mode)) + " 500 voxel additions, " +
                                 std::to_string(violations) + " decreases");
  }
  return o;
}

Outcome property_area_scaling() {
  Outcome o;
  std::mt19937_64 rng(12);
  ScoringConfig cfg;
  cfg.min_component_area_mm2 = 0.0;
  std::size_t violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto volume = t::random_volume(Shape{3, 10, 10}, Spacing{3.0, 0.5, 0.5}, rng);
    const auto mask = t::random_mask(volume.shape(), 0.4, rng);
    for (const auto mode : {ScoringMode::kLesionSpecific, ScoringMode::kClassicSlicewise}) {
      cfg.mode = mode;
      const double base = score_patient(volume, mask, cfg).total_score;
      for (const double s : {0.5, 1.5, 2.0, 3.0}) {
        const auto scaled = volume.with_spacing(Spacing{3.0, 0.5 * s, 0.5 * s});
        const double got = score_patient(scaled, mask, cfg).total_score;
        if (!rel_equal(got, base * s * s)) ++violations;
      }
    }
  }
  o.check(violations == 0,
          "score(s * spacing) == s^2 * score over 400 cases, " + std::to_string(violations) +
              " violations");
  return o;
}

Outcome property_mode_agreement() {
  Outcome o;
  std::mt19937_64 rng(13);
  std::size_t violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto volume = t::random_volume(Shape{1, 16, 16}, Spacing{3.0, 0.5, 0.5}, rng);
    const auto mask = t::random_mask(volume.shape(), 0.3, rng);
    const double a =
        score_patient(volume, mask, mode_config(ScoringMode::kLesionSpecific)).total_score;
    const double b =
        score_patient(volume, mask, mode_config(ScoringMode::kClassicSlicewise)).total_score;
    if (!rel_equal(a, b, 1e-12)) ++violations;
  }
  o.check(violations == 0, "single-slice volumes, 200 cases, " + std::to_string(violations) +
                               " disagreements");
  return o;
}

Outcome property_threshold_monotonicity() {
  Outcome o;
  std::mt19937_64 rng(14);
  std::size_t violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto volume = t::random_volume(Shape{3, 12, 12}, Spacing{3.0, 0.5, 0.5}, rng);
    const auto mask = t::random_mask(volume.shape(), 0.5, rng);
    ScoringConfig cfg;
    double previous = score_patient(volume, mask, cfg).total_score;
    for (double thr = 150.0; thr <= 700.0; thr += 50.0) {
      cfg.hu_threshold = thr;
      const double score = score_patient(volume, mask, cfg).total_score;
      if (score > previous + 1e-9 * std::max(1.0, previous)) ++violations;
      previous = score;
    }
  }
  o.check(violations == 0, "thresholds 130..700, 50 volumes, " + std::to_string(violations) +
                               " increases");
  return o;
}

Outcome property_dice_iou() {
  Outcome o;
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto pred = t::random_mask(Shape{1, 12, 12}, density(rng), rng);
    const auto gt = t::random_mask(Shape{1, 12, 12}, density(rng), rng);
    const auto m = slice_overlap(MaskPlane::of(pred, 0), MaskPlane::of(gt, 0));
    worst = std::max(worst, std::abs(m.dice - 2.0 * m.iou / (1.0 + m.iou)));
  }
  o.check(worst <= 1e-12, "dice == 2 iou / (1 + iou) on 1000 plane pairs, max error " +
                              std::to_string(worst));
  return o;
}

Outcome property_kappa_permutation() {
  Outcome o;
  std::mt19937_64 rng(16);
  std::uniform_int_distribution<std::uint64_t> cell(0, 60);
  std::size_t violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ConfusionMatrix cm;
    for (auto& row : cm.counts) {
      for (auto& c : row) c = cell(rng);
    }
    const double kappa = cohen_kappa(cm);
    std::array<std::size_t, 4> perm{0, 1, 2, 3};
    do {
      ConfusionMatrix p;
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) p.counts[perm[i]][perm[j]] = cm.counts[i][j];
      }
      if (std::abs(cohen_kappa(p) - kappa) > 1e-12 || accuracy(p) != accuracy(cm)) ++violations;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  o.check(violations == 0, "100 matrices x 24 relabelings, " + std::to_string(violations) +
                               " violations");
  return o;
}

// =============================================================================
// Ingestion
// =============================================================================

Outcome ingestion_dicom_round_trip() {
  Outcome o;
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> dim(1, 24), pixel(-2048, 4095), inst(0, 500);
  std::uniform_real_distribution<double> spacing(0.2, 1.5), z(-300.0, 300.0);
  std::size_t mismatches = 0;
  std::size_t cases = 0;
  for (int trial = 0; trial < 50; ++trial) {
    SliceRecord record;
    record.rows = static_cast<std::size_t>(dim(rng));
    record.cols = static_cast<std::size_t>(dim(rng));
    record.row_spacing_mm = spacing(rng);
    record.col_spacing_mm = spacing(rng);
    record.slice_thickness_mm = 2.5;
    record.rescale_slope = trial % 3 == 0 ? 2.0 : 1.0;
    record.rescale_intercept = trial % 2 == 0 ? -1024.0 : 0.0;
    record.z_position_mm = z(rng);
    record.instance_number = inst(rng);
    record.raw_pixels.resize(record.rows * record.cols);
    for (auto& p : record.raw_pixels) p = static_cast<std::int16_t>(pixel(rng));
    for (const bool explicit_vr : {true, false}) {
      for (const bool preamble : {true, false}) {
        dicom::WriteOptions options;
        options.explicit_vr = explicit_vr;
        options.with_preamble = preamble;
        ++cases;
        if (!(dicom::parse_slice(dicom::write_slice(record, options)) == record)) ++mismatches;
      }
    }
  }
  o.check(mismatches == 0, std::to_string(cases) + " slices across both VR encodings, " +
                               std::to_string(mismatches) + " field mismatches");
  return o;
}

Outcome ingestion_hu() {
  Outcome o;
  const auto hu = to_hu(1154, 1.0, -1024.0);
  o.check(hu == 130, "HU(1154, slope 1, intercept -1024) = " + std::to_string(hu));
  return o;
}

Outcome ingestion_fixture_byte_stable() {
  Outcome o;
  const auto dir = t::data_dir() / "phantoms";
  for (const char* name : {"two_lesion", "zero"}) {
    const auto manifest = dir / (std::string(name) + ".vol");
    const auto volume = read_volume_files(manifest);
    const auto saved = save_raw_volume(volume);
    const auto reloaded = load_raw_volume(saved.manifest, saved.payload);
    const auto resaved = save_raw_volume(reloaded);
    const auto original_payload = read_file_bytes(dir / (std::string(name) + ".raw"));
    o.check(saved.payload == original_payload && resaved.payload == saved.payload &&
                resaved.manifest.serialize() == saved.manifest.serialize() &&
                reloaded.hu().size() == volume.hu().size() &&
                std::equal(reloaded.hu().begin(), reloaded.hu().end(), volume.hu().begin()),
            std::string(name) + " load/save/load is byte-identical");
  }
  return o;
}

// =============================================================================
// Service contract
// =============================================================================

struct ServiceRun {
  bool started = false;
  json created, lesions, edited, stale_response, after_stale, exported, imported;
  int stale_status = 0;
};

ServiceRun run_service_flow() {
  ServiceRun run;
  review::ServerOptions options;
  options.data_root = t::data_dir();
  review::ReviewServer server(options);
  const int port = server.start();
  httplib::Client client("127.0.0.1", port);
  const auto post = [&](const std::string& path, const json& body) {
    return client.Post(path, body.dump(), "application/json");
  };
  const auto parse = [](const httplib::Result& res) {
    return res ? json::parse(res->body, nullptr, false) : json();
  };
  run.started = true;
  run.created = parse(post("/studies", {{"study_id", "phantom"},
                                        {"volume", {{"fixture", "phantoms/two_lesion.vol"}}},
                                        {"mask",
                                         {{"source", "file"},
                                          {"path", "phantoms/two_lesion.mask"}}}}));
  run.lesions = parse(client.Get("/studies/phantom/lesions"));
  int target = 0;
  for (const auto& l : run.lesions.value("lesions", json::array())) {
    if (std::abs(l.value("score", 0.0) - 20.0) < 1e-9) target = l["id"].get<int>();
  }
  const json remove = {{"type", "remove_component"}, {"id", target}};
  run.edited =
      parse(post("/studies/phantom/edits", {{"expected_revision", 0}, {"edit", remove}}));
  const auto stale = post("/studies/phantom/edits",
                          {{"expected_revision", 0},
                           {"edit", {{"type", "paint"}, {"value", true}, {"voxels", {{1, 0, 0}}}}}});
  run.stale_status = stale ? stale->status : 0;
  run.stale_response = parse(stale);
  run.after_stale = parse(client.Get("/studies/phantom"));
  run.exported = parse(client.Get("/studies/phantom/export"));
  run.imported = parse(post("/studies", {{"study_id", "imported"},
                                         {"volume", {{"fixture", "phantoms/two_lesion.vol"}}},
                                         {"mask",
                                          {{"source", "inline"},
                                           {"bundle_b64", run.exported["mask"]["bundle_b64"]}}}}));
  server.stop();
  return run;
}

double score_of(const json& j) {
  return j.is_object() && j.contains("total_score") ? j["total_score"].get<double>() : -1.0;
}

Outcome service_rescore() {
  Outcome o;
  const auto run = run_service_flow();
  o.check(rel_equal(score_of(run.created), 27.84),
          "create scores " + fmt(score_of(run.created), 12) + " (expected 27.84)");
  o.check(rel_equal(score_of(run.edited), 7.84) && run.edited.value("category", "") == "cat_0_10",
          "removing the 20.0 lesion rescores to " + fmt(score_of(run.edited), 12) + " " +
              run.edited.value("category", std::string("?")));
  return o;
}

Outcome service_conflict() {
  Outcome o;
  const auto run = run_service_flow();
  const auto& err = run.stale_response.value("error", json::object());
  o.check(run.stale_status == 409 && err.value("current_revision", 0) == 1,
          "stale revision returns " + std::to_string(run.stale_status) +
              " with current_revision " + err.value("current_revision", json()).dump());
  o.check(run.after_stale.value("revision", 0) == 1 &&
              rel_equal(score_of(run.after_stale), 7.84),
          "state after conflict: revision " + run.after_stale.value("revision", json()).dump() +
              ", score " + fmt(score_of(run.after_stale), 12));
  return o;
}

Outcome service_export_import() {
  Outcome o;
  const auto run = run_service_flow();
  const double exported = run.exported.is_object()
                              ? run.exported["report"].value("total_score", -1.0)
                              : -1.0;
  o.check(exported == score_of(run.edited) && score_of(run.imported) == exported,
          "export " + fmt(exported, 17) + ", re-import " + fmt(score_of(run.imported), 17));
  o.check(run.exported.value("edits", json::array()).size() == 1,
          "export carries the edit history");
  return o;
}

std::vector<Criterion> criteria(const TableContext& tables) {
  return {
      {"tables.accuracy_kappa", [=] { return tables_accuracy_kappa(tables); }},
      {"tables.sensitivity_ppv", [=] { return tables_sensitivity_ppv(tables); }},
      {"tables.oracle_exact", [=] { return tables_oracle_exact(tables); }},
      {"tables.runtime", [=] { return tables_runtime(tables); }},
      {"components.exhaustive_4x4",
       [] {
         ComponentTiming timing;
         return components_exhaustive(timing);
       }},
      {"components.random_8x8x8",
       [] {
         ComponentTiming timing;
         return components_random(timing);
       }},
      {"components.runtime", components_runtime},
      {"phantoms.eight_voxel", phantom_eight_voxel},
      {"phantoms.mixed_hu_modes", phantom_mixed_hu},
      {"phantoms.sub_area_focus", phantom_sub_area},
      {"phantoms.sub_threshold_lesion", phantom_sub_threshold},
      {"phantoms.category_boundaries", phantom_categories},
      {"properties.monotonicity", property_monotonicity},
      {"properties.area_scaling", property_area_scaling},
      {"properties.mode_agreement", property_mode_agreement},
      {"properties.threshold_monotonicity", property_threshold_monotonicity},
      {"properties.dice_iou", property_dice_iou},
      {"properties.kappa_permutation", property_kappa_permutation},
      {"ingestion.dicom_round_trip", ingestion_dicom_round_trip},
      {"ingestion.hu_conversion", ingestion_hu},
      {"ingestion.fixture_byte_stable", ingestion_fixture_byte_stable},
      {"service.rescore", service_rescore},
      {"service.stale_revision", service_conflict},
      {"service.export_import", service_export_import},
  };
}

bool selected(const std::string& name, const std::vector<std::string>& filters) {
  if (filters.empty()) return true;
  return std::any_of(filters.begin(), filters.end(), [&](const std::string& f) {
    return name == f || name.rfind(f + ".", 0) == 0;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cacscore acceptance criteria"};
  std::vector<std::string> filters;
  TableContext tables{CACSCORE_ACCEPTANCE_FIXTURE_DIR};
  bool list = false;
  bool quiet = false;
  app.add_option("--criterion", filters, "Criterion name or group (repeatable)");
  app.add_option("--fixtures", tables.fixtures, "Confusion-matrix fixture directory");
  app.add_flag("--list", list, "List criterion names");
  app.add_flag("--quiet", quiet, "Omit detail lines");
  CLI11_PARSE(app, argc, argv);

  const auto all = criteria(tables);
  if (list) {
    for (const auto& c : all) std::cout << c.name << "\n";
    return 0;
  }
  std::size_t run = 0;
  std::size_t failed = 0;
  for (const auto& c : all) {
    if (!selected(c.name, filters)) continue;
    ++run;
    Outcome outcome;
    const auto start = Clock::now();
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.check(false, std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(start);
    if (!outcome.pass) ++failed;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << c.name << " (" << fmt(elapsed, 3)
              << " s)\n";
    if (!quiet) {
      for (const auto& d : outcome.details) std::cout << "    " << d << "\n";
    }
  }
  if (run == 0) {
    std::cerr << "no criterion matches the filter\n";
    return 2;
  }
  std::cout << (run - failed) << "/" << run << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
