// Disturbance quantization by local averages on an equiprobable partition,
// Monte Carlo atom sampling, and path/subsimulation generation with
// antithetic pairing. All randomness is counter-based (csws/rng.hpp), so
// any slice regenerates identically regardless of worker count.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <cstdint>
#include <vector>

#include "csws/rng.hpp"
#include "csws/types.hpp"

namespace csws {

enum class ShockDist {
  normal,     // epsilon ~ N(0, 1)
  lognormal,  // epsilon = exp(u + s Z), Z ~ N(0, 1)
};

enum class EntryTransform {
  affine,      // a + b * epsilon
  exp_affine,  // exp(a + b * epsilon)
};

struct RandomEntry {
  int row = 0;
  int col = 0;
  EntryTransform transform = EntryTransform::affine;
  double a = 0.0;
  double b = 1.0;
};

// A disturbance law W = constant matrix with one or more entries driven by
// a common scalar shock. Antithetic pairing always negates the underlying
// standard normal draw.
struct RandomEntrySpec {
  Mat constant;  // d x d base matrix
  std::vector<RandomEntry> entries;
  ShockDist dist = ShockDist::normal;
  double log_mean = 0.0;  // lognormal u
  double log_sd = 1.0;    // lognormal s, > 0

  int dim() const { return static_cast<int>(constant.rows()); }
  // Shock value from a standard normal draw.
  double shock(double z) const;
  // Writes constant with the entries filled from the shock.
  void realize(double shock_value, Mat& out) const;
};

// Equiprobable quantile cells with closed-form conditional means
// (mean-preserving quantization). Requires exactly one random entry.
DisturbanceSet partition_sampling(const RandomEntrySpec& spec, int n_cells);

// n atoms of weight 1/n. Antithetic mode draws n/2 normals and emits the
// pairs (z, -z) interleaved; n must then be even.
DisturbanceSet monte_carlo_sampling(const RandomEntrySpec& spec, int n,
                                    std::uint64_t seed, bool antithetic);

// Simulated state paths: states[i][t+1] = disturbances[i][t] * states[i][t],
// computed exactly in that order. Antithetic pairs sit on adjacent paths
// (2j, 2j+1) at every time.
class PathBundle {
 public:
  PathBundle(int n_path, int n_dec, int dim, Vec start);

  int n_path() const { return n_path_; }
  int n_dec() const { return n_dec_; }
  int dim() const { return dim_; }
  const Vec& start() const { return start_; }

  const double* state(int i, int t) const {
    return states_.data() +
           (static_cast<std::size_t>(i) * n_dec_ + t) * dim_;
  }
  const double* disturbance(int i, int t) const {
    return disturb_.data() +
           (static_cast<std::size_t>(i) * (n_dec_ - 1) + t) * dim_ * dim_;
  }
  double* mutable_state(int i, int t) {
    return const_cast<double*>(state(i, t));
  }
  double* mutable_disturbance(int i, int t) {
    return const_cast<double*>(disturbance(i, t));
  }

 private:
  int n_path_, n_dec_, dim_;
  Vec start_;
  std::vector<double> states_;   // n_path x n_dec x d
  std::vector<double> disturb_;  // n_path x (n_dec-1) x d x d
};

PathBundle gen_paths(const Vec& start, const RandomEntrySpec& spec, int n_path,
                     int n_dec, std::uint64_t seed, bool antithetic);

// Nested subsimulation disturbances, one d x d matrix per
// (subsim k, path i, step t), uniform weights. Matrices are regenerated on
// demand from the counter-based stream; antithetic pairs are adjacent
// subsims (2j, 2j+1) at fixed (path, step).
class SubsimBundle {
 public:
  SubsimBundle(RandomEntrySpec spec, int n_subsim, int n_path, int n_steps,
               std::uint64_t seed, bool antithetic);

  int n_subsim() const { return n_subsim_; }
  int n_path() const { return n_path_; }
  int n_steps() const { return n_steps_; }
  double weight(int) const { return 1.0 / n_subsim_; }

  // Fills out (d x d) with the disturbance matrix of (k, i, t).
  void matrix(int k, int i, int t, Mat& out) const;
  double shock_normal(int k, int i, int t) const;  // underlying normal draw

 private:
  RandomEntrySpec spec_;
  int n_subsim_, n_path_, n_steps_;
  std::uint64_t seed_;
  bool antithetic_;
};

SubsimBundle gen_subsim(const RandomEntrySpec& spec, int n_subsim, int n_path,
                        int n_dec, std::uint64_t seed, bool antithetic);

}  // namespace csws
