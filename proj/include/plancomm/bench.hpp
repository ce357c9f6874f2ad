#pragma once

// Automated benchmark: mirror models built from planning instances and
// goal pools, the three strategies swept over plan fractions, and the
// entropy-gain / distance-to-goal metrics.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plancomm/mirror.hpp"
#include "plancomm/pddl.hpp"

namespace plancomm::bench {

struct SetupOptions {
  std::size_t goals_per_model = 4;  // robot goal plus decoys
  std::size_t uncertain_atoms = 4;
  double theta = 0.5;
  std::size_t k = 1;
  double tau = 1.0;
};

struct InstanceSetup {
  MirrorModel model;
  std::size_t robot_pool_index = 0;
  std::vector<std::size_t> pool_indices;  // [0] is the robot goal
  std::vector<pddl::GroundAtom> uncertain;
  std::vector<std::string> warnings;
};

// Samples the robot goal and distinct decoys from the pool, then uncertain
// atoms from the robot's initial atoms that some action of its plan needs.
InstanceSetup setup_instance(const pddl::Domain& domain, const pddl::Problem& problem,
                             const std::vector<std::vector<pddl::GroundAtom>>& goal_pool,
                             std::uint64_t seed, const SetupOptions& options = {});

struct Distance {
  double value = 0.0;
  bool flagged = false;  // no goal-affecting action at or after the index
};

// Offset to the first action at or after `action_index` whose add or delete
// list touches a goal atom, divided by the plan length.
Distance distance_to_goal(const MirrorModel& model, std::size_t action_index);

// N = max(1, round-half-up(x * L)), capped at the number of distinct actions.
std::size_t verbalization_size(double fraction, std::size_t plan_length, std::size_t distinct);

enum StrategyColumn { kInc = 0, kDec = 1, kInf = 2 };

struct CurvePoint {
  double x = 0.0;
  std::size_t n = 0;
  double h[3] = {0, 0, 0};     // conditional cross-entropy per strategy
  double gain[3] = {0, 0, 0};  // h[s] - h[kInf]
  double dist[3] = {0, 0, 0};  // D_G of the newly communicated action
  bool flagged = false;
};

struct InstanceResult {
  std::string name;
  std::size_t plan_length = 0;
  std::size_t hypotheses = 0;
  double h_prior = 0.0;
  double first_dist[3] = {0, 0, 0};  // D_G of the single action chosen at N = 1
  std::vector<CurvePoint> points;
};

InstanceResult evaluate_instance(const std::string& name, const MirrorModel& model,
                                 const std::vector<double>& fractions);

struct MetricsRow {
  double x = 0.0;
  double h[3] = {0, 0, 0};
  double gain[3] = {0, 0, 0};
  double dist[3] = {0, 0, 0};
  std::size_t instances = 0;
  std::size_t flagged = 0;
};

struct Failure {
  std::string instance;
  std::string reason;
};

struct DomainResult {
  std::string domain;
  std::vector<InstanceResult> instances;
  std::vector<MetricsRow> rows;  // averaged over instances
  std::vector<Failure> failures;

  double mean_first_dist(StrategyColumn s) const;
};

struct BenchConfig {
  std::string dataset_dir;      // holds <domain>/domain.pddl, pNN.pddl, pNN.hyps
  std::vector<std::string> domains;
  std::size_t instances_per_domain = 10;
  std::vector<double> fractions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  SetupOptions setup{};
  std::uint64_t seed = 0;

  void validate() const;
};

std::vector<DomainResult> run_benchmark(const BenchConfig& config);

std::vector<MetricsRow> average(const std::vector<InstanceResult>& instances);

// x, e_gain_inc, e_gain_dec, e_gain_ent, g_dist_inc, g_dist_dec, g_dist_ent
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
// Raw conditional cross-entropy curves plus instance counts.
void write_entropy_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

}  // namespace plancomm::bench
