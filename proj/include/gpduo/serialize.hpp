#pragma once

// JSON and CSV forms of the artifact types. Numbers are written with 17
// significant digits; config objects reject unknown keys.

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpduo/blowup.hpp"
#include "gpduo/criteria.hpp"
#include "gpduo/fields.hpp"
#include "gpduo/minimizer.hpp"
#include "gpduo/townes.hpp"

namespace gpduo::serialize {

using Json = nlohmann::ordered_json;

std::string fmt17(double v);
// Pretty JSON (2-space indent) with every floating value at 17 digits.
std::string dump(const Json& j);

// ConfigError unless j is an object whose keys are all in allowed.
void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

// "1.5" or "0.5a" (a multiple of a*); the suffix needs a_star.
double parse_scaled(const std::string& text, std::optional<double> a_star);
// Number, or string in the form accepted by parse_scaled.
double scaled_value(const Json& v, std::optional<double> a_star, const std::string& where);

struct TownesArtifact {
  townes::RadialProfile profile;
  townes::TownesConstants constants;

  blowup::Townes view() const { return {&profile, constants}; }
};

// {a_star, q0, kinetic, l4, moments: {"p": value}, profile: [{r, q}]}
Json townes_to_json(const townes::RadialProfile& profile, const townes::TownesConstants& c);
TownesArtifact townes_from_json(const Json& j);

Json grid_to_json(const Grid2D& g);
Grid2D grid_from_json(const Json& j);

// "harmonic" or {v1: {centers: [{at: [x, y], exponent}], modulator}, v2: ...}
Json potential_to_json(const fields::PotentialSpec& p);
fields::PotentialSpec potential_from_json(const Json& j);
Json analysis_to_json(const fields::PotentialAnalysis& a);

Json params_to_json(const criteria::CouplingParams& p);
criteria::CouplingParams params_from_json(const Json& j, std::optional<double> a_star);
Json label_to_json(const criteria::RegionLabel& l);

// {dt, max_iters, grad_tol, seed, init, init_width, init_center, tau,
//  townes_center, warm, energy_floor}; init is gaussian | random-gaussian |
// townes-seeded | warm-start, warm a field file holding two components.
minimizer::FlowConfig flow_from_json(const Json& j, const TownesArtifact* townes);
Json flow_to_json(const minimizer::FlowConfig& cfg);

Json result_to_json(const minimizer::MinimizeResult& r);
Json fit_to_json(const blowup::FitResult& f);
Json wells_to_json(const blowup::WellsReport& w);

// {beta, eps_list | eps: {from, to, points}, path, split, potential, grid,
//  flow, min_core_points, boundary_mass_tol}
blowup::SweepSpec sweep_from_json(const Json& j, const TownesArtifact& townes);

inline constexpr const char* kRecordHeader =
    "eps_raw,b1,b2,beta,energy,l4_1,l4_2,diff2,mu1,mu2,max1x,max1y,max2x,max2y,profile_dist";

std::string records_to_csv(const std::vector<blowup::SweepRecord>& records);
std::vector<blowup::SweepRecord> records_from_csv(const std::string& text);

}  // namespace gpduo::serialize
