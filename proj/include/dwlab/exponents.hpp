#pragma once

// Exact exponent algebra for the space-time estimates of the damped wave
// flow: derivative-loss order gamma(q,r) of the homogeneous estimate, the
// admissibility predicates, and the extra interaction loss delta(q,r,qt,rt)
// of the inhomogeneous estimate, all in exact rational arithmetic.
//
// Conventions: a Lebesgue pair (q,r) carries the time exponent q in [2,inf]
// and the space exponent r in [2,inf). All reported losses are orders of
// <nabla>^s, so "total = -1" means a gain of one derivative.

#include <string>
#include <vector>

#include "dwlab/rational.hpp"

namespace dwlab::exponents {

struct PairQR {
  ExtRational q;
  ExtRational r;
  int d;

  // Enforces 2 <= q <= inf, 2 <= r < inf, 1 <= d; throws std::invalid_argument.
  PairQR(ExtRational q_, ExtRational r_, int d_);
};

enum class Branch { Strict, ScalingCritical, TrivialEnergy };

const char* branch_name(Branch b);

struct HomReport {
  bool accepted = false;
  bool heat_endpoint = false;  // (q,r) == (2, 2d/(d-2)), d >= 3
  std::string reason;          // first violated condition when rejected
};

struct InhomReport {
  bool accepted = false;
  Branch branch = Branch::Strict;
  std::string reason;
};

struct LossReport {
  ExtRational gamma;
  ExtRational gamma_tilde;
  ExtRational delta;
  ExtRational total_order_D;     // gamma + gamma_tilde + delta - 1
  ExtRational total_order_dtD;   // total_order_D + 1
  Branch branch = Branch::Strict;
};

// gamma(q,r) = max{ d(1/2 - 1/r) - 1/q, (d+1)/2 (1/2 - 1/r) }.
ExtRational gamma_loss(const PairQR& p);

// Accepts iff d/2 (1/2 - 1/r) >= 1/q; flags the heat endpoint.
HomReport check_homogeneous(const PairQR& p);

// Admissibility of the pair interaction. Rejection reports the first violated
// condition in fixed order: endpoint exclusions (d >= 4, (q,r) slot before
// (qt,rt) slot), then the interaction sum condition, then the critical-line
// exponent ordering. Dimension mismatch is a usage error and throws.
InhomReport check_inhomogeneous(const PairQR& p, const PairQR& pt);

// Extra loss from the interaction table. pre: check_inhomogeneous accepts
// (revalidated; throws std::invalid_argument otherwise).
ExtRational delta_loss(const PairQR& p, const PairQR& pt);

// Full report for an accepted pair interaction.
LossReport total_inhomogeneous_order(const PairQR& p, const PairQR& pt);

// Curated demonstration rows for the CSV table (mixed dimensions; the two
// rejection rows keep their per-pair gamma values and render delta and total
// as "-").
struct TableRow {
  PairQR a;
  PairQR b;
};
std::vector<TableRow> curated_pairs();

// CSV with header "q,r,qt,rt,gamma,gamma_tilde,delta,branch,total".
std::string render_table_csv(const std::vector<TableRow>& rows);

}  // namespace dwlab::exponents
