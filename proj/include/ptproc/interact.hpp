#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "ptproc/path.hpp"
#include "ptproc/ratefn.hpp"
#include "ptproc/rng.hpp"
#include "ptproc/skellam.hpp"
#include "ptproc/table.hpp"

namespace ptproc::interact {

/* Two interacting counting populations. Each group moves up (lambda), down
 * (mu) or idles (delta) at every synchronous epoch, and unilateral migration
 * moves one unit between the groups (eta12: group 1 -> group 2). */
struct InteractingSkellamSpec {
  RateFunction lambda1, mu1, delta1;
  RateFunction lambda2, mu2, delta2;
  RateFunction eta12, eta21;
  int n1 = 0, n2 = 0;
};

/* The eight synchronous jump types and their rate functions, in a fixed
 * order: (1,1), (-1,-1), (1,-1), (-1,1), (1,0), (0,1), (-1,0), (0,-1). */
struct JumpMenu {
  std::array<std::array<int, 2>, 8> jumps;
  std::array<RateFunction, 8> rates;
};
JumpMenu jump_menu(const InteractingSkellamSpec& spec);

/* Total jump intensity (sum of the menu rates). */
RateFunction event_rate(const InteractingSkellamSpec& spec);

/* Independent-Skellam decomposition: N1 = S1 + S3 + S4, N2 = S2 + S3 - S4. */
struct Decomposition {
  skellam::NhSkellamSpec s1, s2, s3, s4;
};
Decomposition decompose(const InteractingSkellamSpec& spec);

/* Marginal laws: each N_i is a non-homogeneous Skellam process. */
std::pair<skellam::NhSkellamSpec, skellam::NhSkellamSpec> marginal_rates(
    const InteractingSkellamSpec& spec);

/* E[u^{N1(t)} v^{N2(t)}], u, v > 0. */
double joint_pgf(const InteractingSkellamSpec& spec, double t, double u,
                 double v);

/* PGF of the increment over (s, t]; equals joint_pgf(t)/joint_pgf(s). */
double increment_pgf(const InteractingSkellamSpec& spec, double s, double t,
                     double u, double v);

/* P{N1(t) = m, N2(t) = n} by the four-fold Bessel convolution. */
double joint_pmf(const InteractingSkellamSpec& spec, double t, int m, int n);

/* Truncated joint pmf over [lo, hi]; component windows are tail-bounded so
 * the declared truncation bound covers the neglected mass. */
Table2 joint_table(const InteractingSkellamSpec& spec, double t,
                   std::array<int, 2> lo, std::array<int, 2> hi,
                   double tail = 1e-12);

/* Cov(N1(s), N2(t)) for the exact joint law. */
double covariance(const InteractingSkellamSpec& spec, double s, double t);

/* Direct thinning sampler over the eight-type menu (one uniform per epoch
 * drives both acceptance and type selection). */
SamplePath<2> sample_direct(const InteractingSkellamSpec& spec, double horizon,
                            Rng& rng);

/* Sampler through the independent-Skellam decomposition. */
SamplePath<2> sample_decomposed(const InteractingSkellamSpec& spec,
                                double horizon, Rng& rng);

/* Compound-Poisson form for constant rates: total epoch rate and the jump
 * law over the eight vectors. */
struct CompoundRepresentation {
  double rate = 0.0;
  std::array<std::array<int, 2>, 8> jumps;
  std::array<double, 8> probs;
};
CompoundRepresentation compound_representation(
    const InteractingSkellamSpec& spec);

/* Law of a N1 + b N2 as a generalized Skellam increment spec (jump sizes
 * a, b, a+b, a-b and their negatives; zero jumps dropped). The initial offset
 * a*n1 + b*n2 is not part of the returned spec. */
skellam::GeneralizedSkellamSpec linear_combination(
    const InteractingSkellamSpec& spec, int a, int b);

/* Generalized bidimensional model: arbitrary jump menus I1, I2, multi-unit
 * migration menus, idle rates. */
struct GeneralizedInteractSpec {
  std::map<int, RateFunction> group1;       // lambda^1_h, h in I1 (h != 0)
  std::map<int, RateFunction> group2;       // lambda^2_k, k in I2 (k != 0)
  std::map<int, RateFunction> migration12;  // eta^12_h, h >= 1
  std::map<int, RateFunction> migration21;  // eta^21_k, k >= 1
  RateFunction delta1, delta2;
  void validate() const;
};

struct PoissonTerm {
  int jump;
  RateFunction rate;
};

/* Poisson-superposition description of each marginal. */
std::pair<std::vector<PoissonTerm>, std::vector<PoissonTerm>>
generalized_marginals(const GeneralizedInteractSpec& spec);

/* Merge terms with equal jump size into a generalized Skellam spec. */
skellam::GeneralizedSkellamSpec merge_terms(
    const std::vector<PoissonTerm>& terms);

/* Trivariate model: three groups, pairwise unilateral migration. */
struct TrivariateSpec {
  std::array<RateFunction, 3> lambda, mu, delta;
  // eta[i][j] is the i -> j migration rate (diagonal entries ignored).
  std::array<std::array<RateFunction, 3>, 3> eta;
  std::array<int, 3> initial{};
};

/* One Skellam component of the trivariate decomposition: its canonical sign
 * vector (first nonzero entry +1) and up/down rate functions. */
struct TrivariateComponent {
  std::array<int, 3> signs;
  RateFunction up, down;
};

/* The 13 = (3^3 - 1)/2 components. Component s jumps by +s at rate up and by
 * -s at rate down; marginals are sums of the incident components. */
std::vector<TrivariateComponent> trivariate_decompose(
    const TrivariateSpec& spec);

}  // namespace ptproc::interact
