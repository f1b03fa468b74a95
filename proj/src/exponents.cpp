#include "dwlab/exponents.hpp"

#include <sstream>
#include <stdexcept>

namespace dwlab::exponents {

namespace {

const ExtRational kHalf(1, 2);

// 1/2 - 1/r, the distance of the space exponent from L^2.
ExtRational x_of(const PairQR& p) { return kHalf - p.r.reciprocal(); }

// Wave admissibility (d-1)/2 (1/2 - 1/r) >= 1/q; the table rows key on it.
bool wave_admissible(const PairQR& p) {
  return ExtRational(p.d - 1, 2) * x_of(p) >= p.q.reciprocal();
}

bool is_wave_endpoint(const PairQR& p) {
  if (p.d < 4) return false;
  return p.q == ExtRational(2) && p.r == ExtRational(2 * (p.d - 1), p.d - 3);
}

bool is_heat_endpoint(const PairQR& p) {
  if (p.d < 3) return false;
  return p.q == ExtRational(2) && p.r == ExtRational(2 * p.d, p.d - 2);
}

}  // namespace

PairQR::PairQR(ExtRational q_, ExtRational r_, int d_) : q(q_), r(r_), d(d_) {
  if (d < 1) throw std::invalid_argument("PairQR: dimension must be >= 1");
  if (q < ExtRational(2)) throw std::invalid_argument("PairQR: need 2 <= q <= inf");
  if (r.is_inf() || r < ExtRational(2))
    throw std::invalid_argument("PairQR: need 2 <= r < inf");
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Strict: return "Strict";
    case Branch::ScalingCritical: return "ScalingCritical";
    case Branch::TrivialEnergy: return "TrivialEnergy";
  }
  return "?";
}

ExtRational gamma_loss(const PairQR& p) {
  const ExtRational x = x_of(p);
  const ExtRational heat = ExtRational(p.d) * x - p.q.reciprocal();
  const ExtRational wave = ExtRational(p.d + 1, 2) * x;
  return max(heat, wave);
}

HomReport check_homogeneous(const PairQR& p) {
  HomReport rep;
  rep.heat_endpoint = is_heat_endpoint(p);
  if (ExtRational(p.d, 2) * x_of(p) >= p.q.reciprocal()) {
    rep.accepted = true;
    return rep;
  }
  rep.reason = "scaling condition: d/2(1/2-1/r) < 1/q";
  return rep;
}

InhomReport check_inhomogeneous(const PairQR& p, const PairQR& pt) {
  if (p.d != pt.d)
    throw std::invalid_argument("check_inhomogeneous: dimension mismatch");
  InhomReport rep;
  if (is_wave_endpoint(p)) {
    rep.reason = "wave endpoint excluded: (q,r) = (2, 2(d-1)/(d-3))";
    return rep;
  }
  if (is_wave_endpoint(pt)) {
    rep.reason = "wave endpoint excluded: (qt,rt) = (2, 2(d-1)/(d-3))";
    return rep;
  }
  const ExtRational lhs =
      ExtRational(p.d, 2) * x_of(p) + ExtRational(p.d, 2) * x_of(pt);
  const ExtRational rhs = p.q.reciprocal() + pt.q.reciprocal();
  if (lhs > rhs) {
    rep.accepted = true;
    rep.branch = Branch::Strict;
    return rep;
  }
  if (lhs < rhs) {
    rep.reason = "sum condition: d/2(1/2-1/r) + d/2(1/2-1/rt) < 1/q + 1/qt";
    return rep;
  }
  if (p.q.is_inf() && p.r == ExtRational(2) && pt.q.is_inf() &&
      pt.r == ExtRational(2)) {
    rep.accepted = true;
    rep.branch = Branch::TrivialEnergy;
    return rep;
  }
  const ExtRational qtc = pt.q.conjugate();
  if (ExtRational(1) < qtc && qtc < p.q && !p.q.is_inf()) {
    rep.accepted = true;
    rep.branch = Branch::ScalingCritical;
    return rep;
  }
  rep.reason = "critical line: need 1 < qt' < q < inf";
  return rep;
}

ExtRational delta_loss(const PairQR& p, const PairQR& pt) {
  const InhomReport rep = check_inhomogeneous(p, pt);
  if (!rep.accepted)
    throw std::invalid_argument("delta_loss: pair interaction rejected: " + rep.reason);

  const ExtRational x = x_of(p), xt = x_of(pt);
  const ExtRational left = pt.q.reciprocal() * x;   // 1/qt (1/2 - 1/r)
  const ExtRational right = p.q.reciprocal() * xt;  // 1/q  (1/2 - 1/rt)
  if (left == right) return ExtRational(0);

  const bool w = wave_admissible(p);
  const bool wt = wave_admissible(pt);
  const ExtRational half_dm1(p.d - 1, 2);

  if (w && wt) return ExtRational(0);
  if (w && !wt) {
    // Left column cannot occur: w gives x >= 2/(d-1) 1/q, !wt gives
    // xt < 2/(d-1) 1/qt, so 1/qt x >= 2/((d-1) q qt) > 1/q xt.
    if (left < right)
      throw std::logic_error("delta_loss: unreachable table cell (row 2, left)");
    return (pt.q / p.q) * (pt.q.reciprocal() - half_dm1 * xt);
  }
  if (!w && wt) {
    if (left > right)
      throw std::logic_error("delta_loss: unreachable table cell (row 3, right)");
    return (p.q / pt.q) * (p.q.reciprocal() - half_dm1 * x);
  }
  // Neither admissible; both q, qt finite here since x < 2/(d-1) 1/q forces
  // 1/q > 0.
  if (left < right)
    return pt.q.reciprocal() * half_dm1 * (pt.q * xt - p.q * x);
  return p.q.reciprocal() * half_dm1 * (p.q * x - pt.q * xt);
}

LossReport total_inhomogeneous_order(const PairQR& p, const PairQR& pt) {
  const InhomReport rep = check_inhomogeneous(p, pt);
  if (!rep.accepted)
    throw std::invalid_argument("total_inhomogeneous_order: rejected: " + rep.reason);
  LossReport out;
  out.gamma = gamma_loss(p);
  out.gamma_tilde = gamma_loss(pt);
  out.delta = delta_loss(p, pt);
  out.total_order_D = out.gamma + out.gamma_tilde + out.delta - ExtRational(1);
  out.total_order_dtD = out.total_order_D + ExtRational(1);
  out.branch = rep.branch;
  return out;
}

std::vector<TableRow> curated_pairs() {
  const ExtRational inf = ExtRational::inf();
  std::vector<TableRow> rows;
  auto add = [&rows](int d, ExtRational q, ExtRational r, ExtRational qt, ExtRational rt) {
    rows.push_back(TableRow{PairQR(q, r, d), PairQR(qt, rt, d)});
  };
  add(3, 4, 6, 8, 4);                                  // both wave-admissible
  add(3, 4, 4, 4, 4);                                  // diagonal, delta = 0
  add(3, 4, 3, 4, 6);                                  // row-3 table cell
  add(3, inf, 2, inf, 2);                              // trivial energy pair
  add(4, 2, 6, 4, 4);                                  // wave endpoint, rejected
  add(3, 8, 8, 8, 8);                                  // one full loss
  add(3, inf, 4, 4, 4);                                // q = inf slot
  add(3, 4, 6, 4, 3);                                  // symmetric swap of row 3
  add(3, 4, 4, 4, ExtRational(12, 5));                 // scaling-critical branch
  add(3, ExtRational(10, 3), 4, ExtRational(8, 3), 6); // neither admissible
  return rows;
}

std::string render_table_csv(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  os << "q,r,qt,rt,gamma,gamma_tilde,delta,branch,total\n";
  for (const TableRow& row : rows) {
    os << row.a.q.str() << ',' << row.a.r.str() << ',' << row.b.q.str() << ','
       << row.b.r.str() << ',';
    os << gamma_loss(row.a).str() << ',' << gamma_loss(row.b).str() << ',';
    const InhomReport rep = check_inhomogeneous(row.a, row.b);
    if (!rep.accepted) {
      const bool endpoint = rep.reason.find("endpoint") != std::string::npos;
      os << "-," << (endpoint ? "reject:wave-endpoint" : "reject:sum-condition")
         << ",-\n";
      continue;
    }
    const LossReport loss = total_inhomogeneous_order(row.a, row.b);
    os << loss.delta.str() << ',' << branch_name(loss.branch) << ','
       << loss.total_order_D.str() << '\n';
  }
  return os.str();
}

}  // namespace dwlab::exponents
