#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "segsamp/concordance.hpp"
#include "segsamp/optimizer.hpp"
#include "segsamp/sampling.hpp"

namespace segsamp {

enum class Kind {
  AntitheticPair,
  Rotation,
  AjBaseB,
  Gaffke3,
  GaffkeD,
  Ccv,
  Rbs,
  Lh,
  Ilh,
  Custom,
  Composed,
  Iid,  // independent uniforms; used as a base measure
};

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& s);

struct Construction {
  Kind kind = Kind::Iid;
  int d = 2;
  int b = 2;
  std::vector<int> offsets{1};
  int T = 1;
  bool exchangeable = false;
  std::string path;                // custom: segment-set JSON file
  std::string mode = "stochastic";  // composed: stochastic | deterministic
  std::vector<Construction> parts;  // composed parts, or the ilh base
};

nlohmann::json construction_to_json(const Construction& c);
Construction construction_from_json(const nlohmann::json& j);

struct Design {
  Construction spec;
  int d = 0;
  std::string name;
  // segment representation driving the sampler, when one exists
  std::optional<SegmentSet> segments;
  VModel vmodel = VModel::Common;
  // exact-measure representation; empty when only empirical estimates apply
  std::vector<Block> blocks;
  bool strict_ctm = false;
  VectorSource sampler;
};

Design resolve(const Construction& c, const SolverOptions& opt = {});
DrawBatch sample(const Design& design, std::int64_t n, std::uint64_t seed, std::uint64_t stream = 0,
                 Exec exec = Exec::Parallel);

// Shorthands used by tests and experiments.
Construction make_construction(Kind k, int d, int b = 2, std::vector<int> offsets = {1}, int T = 1,
                               bool exchangeable = false);

}  // namespace segsamp
