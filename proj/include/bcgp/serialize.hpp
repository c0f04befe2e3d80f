#pragma once

#include <json.hpp>
#include <string>

#include "bcgp/data.hpp"
#include "bcgp/optimize.hpp"
#include "bcgp/params.hpp"
#include "bcgp/wgp.hpp"

namespace bcgp {

using json = nlohmann::json;

/// [{"kind": "boxcox", "params": {"lambda": ..}}, {"kind": "affine", "params": {"a": .., "b": ..}}]
json warping_to_json(const Warping& w);
Warping warping_from_json(const json& j, const std::string& path = "warping");

/// {"terms": [{"type": "squared_exponential", ...}, {"type": "spectral_mixture", "components": [...]},
///            {"type": "white_noise", "variance": ..}]}
json kernel_to_json(const Kernel& k);
Kernel kernel_from_json(const json& j, const std::string& path = "kernel");

json mean_to_json(const MeanFunction& m);
MeanFunction mean_from_json(const json& j, const std::string& path = "mean");

json hyperparameters_to_json(const Hyperparameters& h);
Hyperparameters hyperparameters_from_json(const json& j, const std::string& path = "");

/// Self-contained fitted model: hyperparameters plus training data.
json model_to_json(const WarpedGpModel& model);
WarpedGpModel model_from_json(const json& j);

json scores_to_json(const Scores& s);
json summary_to_json(const ChainSummary& s, const std::vector<std::string>& names);

/// One CSV row per test point: t, median, lower, upper, mode, gh_mean, gh_var.
std::string predictions_to_csv(const PredictiveSummary& p);
json predictions_to_json(const PredictiveSummary& p);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// FNV-1a 64-bit over the canonical (key-sorted, compact) JSON dump, as hex.
std::string config_hash(const json& j);

}  // namespace bcgp
