#include "diraclab/projectors.hpp"

#include <cmath>

namespace diraclab {

namespace {

const cplx I(0.0, 1.0);

// j-th Moyal bidifferential term on jet matrices; the result is reliable j
// degrees below the operands.
JetMat4 moyal_term(const JetMat4& a, const JetMat4& b, int j, int dim) {
  if (j == 0) return a * b;
  const JetTable& pairs = JetTable::get(2 * dim, j);
  JetMat4 acc(a.table());
  cplx pref = std::pow(I * 0.5, j);
  for (int idx = 0; idx < pairs.size; ++idx) {
    if (pairs.deg_of[idx] != j) continue;
    const ExpoVec& c = pairs.expo[idx];
    ExpoVec ea{}, eb{};
    int abs_nu = 0;
    for (int v = 0; v < dim; ++v) {
      uint8_t mu = c[v], nu = c[dim + v];
      abs_nu += nu;
      ea[v] = mu;
      ea[dim + v] = nu;
      eb[v] = nu;
      eb[dim + v] = mu;
    }
    cplx coef = pref * ((abs_nu % 2) ? -1.0 : 1.0) / pairs.fact[idx];
    acc += (a.derivative(ea) * b.derivative(eb)) * coef;
  }
  return acc;
}

}  // namespace

std::vector<JetMat4> almost_projector_jets(const DiracSymbolSet& set, Branch branch, int order,
                                           const Vec3& x, const Vec3& p, const JetContext& ctx) {
  if (order < 0) throw OrderUnavailable("projector order must be non-negative");
  const int deg = ctx.degree + order;
  if (deg > JetTable::max_degree - 1)
    throw OrderUnavailable("projector order exceeds the derivative budget of the base symbols");

  PhaseJets s = seed_phase(x, p, JetContext{ctx.dim, deg});
  const JetTable& tab = *s.tab;

  JetMat4 P0 = set.Pi0(branch).jets(s);
  JetMat4 H = set.H.jets(s);
  JetMat4 Q0 = JetMat4::identity(tab) - P0;
  Jet gap = set.h(branch).jet(s) - set.h(other_branch(branch)).jet(s);
  Jet inv_gap = jet_inv(gap);

  std::vector<JetMat4> pi;
  pi.reserve(static_cast<size_t>(order) + 1);
  pi.push_back(P0);

  for (int k = 1; k <= order; ++k) {
    // idempotency defect at order k, without the unknown pi_k
    JetMat4 G(tab);
    for (int j = 0; j <= k; ++j)
      for (int l = 0; l + j <= k; ++l) {
        int m = k - j - l;
        if (l >= k || m >= k || m < 0) continue;
        G += moyal_term(pi[static_cast<size_t>(l)], pi[static_cast<size_t>(m)], j, ctx.dim);
      }
    // commutation defect at order k, without [H, pi_k]
    JetMat4 F(tab);
    for (int m = 0; m < k; ++m) {
      int j = k - m;
      F += moyal_term(H, pi[static_cast<size_t>(m)], j, ctx.dim) -
           moyal_term(pi[static_cast<size_t>(m)], H, j, ctx.dim);
    }

    JetMat4 pik = (P0 * G * P0) * cplx(-1.0) + Q0 * G * Q0;
    JetMat4 od = P0 * F * Q0;
    JetMat4 od2 = Q0 * F * P0;
    for (int i = 0; i < 4; ++i)
      for (int jj = 0; jj < 4; ++jj)
        pik(i, jj) += (od2(i, jj) - od(i, jj)) * inv_gap;
    pi.push_back(std::move(pik));
  }
  return pi;
}

AlmostProjectorSymbol correct_projector_symbol(const DiracSymbolSet& set, Branch branch,
                                               int order, int dim) {
  AlmostProjectorSymbol out;
  out.branch = branch;
  out.order = order;
  out.dim = dim;
  std::vector<MatrixSymbol> coeffs;
  for (int k = 0; k <= order; ++k) {
    coeffs.emplace_back(
        [set, branch, k, dim](const PhaseJets& s) {
          JetContext ctx{dim, s.degree()};
          return almost_projector_jets(set, branch, k, s.x0, s.p0, ctx)[static_cast<size_t>(k)];
        },
        JetTable::max_degree - 1 - 2 * k, true);
  }
  out.expansion = SymbolExpansion(std::move(coeffs), 0);
  return out;
}

Eigen::MatrixXcd ProjectorQuantization::assemble(int order) const {
  if (order > max_order) throw OrderUnavailable("assembly order beyond the tabulated coefficients");
  Eigen::MatrixXcd m = coeff[0];
  for (int k = 1; k <= order; ++k) m += std::pow(grid.hbar, k) * coeff[static_cast<size_t>(k)];
  return m;
}

ProjectorQuantization quantize_projector_coefficients(const DiracSymbolSet& set, Branch branch,
                                                      int max_order, const QuantumGrid& g) {
  g.require_nyquist(set.cst);
  ProjectorQuantization out;
  out.grid = g;
  out.branch = branch;
  out.max_order = max_order;
  JetContext ctx{g.dim, 0};
  auto eval = [&set, branch, max_order, &ctx](const Vec3& x, const Vec3& p,
                                              std::vector<Mat4>& vals) {
    std::vector<JetMat4> jets = almost_projector_jets(set, branch, max_order, x, p, ctx);
    for (int k = 0; k <= max_order; ++k) vals[static_cast<size_t>(k)] = jets[static_cast<size_t>(k)].value();
  };
  out.coeff = quantize_dense_batch(g, max_order + 1, eval, true);
  return out;
}

GridProjector riesz_flatten(const Eigen::MatrixXcd& almost, const QuantumGrid& g, Branch branch,
                            int order) {
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  hermitian_eig(almost, evals, evecs);

  GridProjector p;
  p.grid = g;
  p.branch = branch;
  p.source_order = order;
  p.spectrum_lo = evals.minCoeff();
  p.spectrum_hi = evals.maxCoeff();
  p.cluster_distance = 1e300;
  for (long i = 0; i < evals.size(); ++i) {
    double d = std::abs(evals[i] - 0.5);
    p.cluster_distance = std::min(p.cluster_distance, d);
    if (evals[i] > 0.25 && evals[i] < 0.75)
      throw ClusterOverlap("quantized almost-projector has an eigenvalue at " +
                           std::to_string(evals[i]) +
                           "; the symbol is unresolved or the gap condition fails");
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(almost.rows(), almost.cols());
  long rank = 0;
  for (long i = 0; i < evals.size(); ++i) {
    if (evals[i] > 0.5) {
      m += evecs.col(i) * evecs.col(i).adjoint();
      ++rank;
    }
  }
  p.matrix = 0.5 * (m + m.adjoint());
  p.rank = rank;
  return p;
}

GridProjector quantize_and_riesz(const DiracSymbolSet& set, const AlmostProjectorSymbol& sym,
                                 const QuantumGrid& g) {
  if (sym.dim != g.dim)
    throw ConfigError("projector symbol and grid have different active dimensions");
  ProjectorQuantization q = quantize_projector_coefficients(set, sym.branch, sym.order, g);
  return riesz_flatten(q.assemble(sym.order), g, sym.branch, sym.order);
}

const std::vector<double>& ScalingReport::column(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return values[i];
  throw ConfigError("no scaling column named " + name);
}

double ScalingReport::slope_of(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return slopes[i];
  throw ConfigError("no scaling column named " + name);
}

namespace {
void fit_slopes(ScalingReport& r) {
  r.slopes.clear();
  bool all_floor = true;
  for (const auto& col : r.values) {
    bool floor = true;
    for (double v : col) floor = floor && v < 1e-12;
    all_floor = all_floor && floor;
    r.slopes.push_back(floor ? std::numeric_limits<double>::quiet_NaN()
                             : loglog_slope(r.hbar, col));
  }
  r.exact = all_floor;
}
}  // namespace

ScalingReport defect_report(const DiracSymbolSet& set, Branch branch, int order,
                            const std::vector<double>& hbars, const GridFactory& grids) {
  if (hbars.size() < 3)
    throw ConfigError("a defect scaling report needs at least three hbar values");
  ScalingReport r;
  r.claim = "projector-defects-order-" + std::to_string(order);
  r.columns = {"defect_idem", "defect_comm", "defect_complement"};
  r.values.assign(3, {});

  for (double hb : hbars) {
    QuantumGrid g = grids(hb);
    ProjectorQuantization qp = quantize_projector_coefficients(set, branch, order, g);
    ProjectorQuantization qm =
        quantize_projector_coefficients(set, other_branch(branch), order, g);
    Eigen::MatrixXcd pi = qp.assemble(order);
    Eigen::MatrixXcd pim = qm.assemble(order);
    Eigen::MatrixXcd hd = DiracGridHamiltonian::build(set, g).dense();

    // all defects are hermitian; norms come from matrix-free Lanczos on the
    // mask-sandwiched operators
    Eigen::VectorXd mask = bulk_mask(g, default_bulk_margin(g));
    const long n = pi.rows();
    auto masked_extremal = [&](const std::function<void(const Eigen::VectorXcd&,
                                                        Eigen::VectorXcd&)>& apply) {
      auto wrapped = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
        Eigen::VectorXcd mv = mask.asDiagonal() * v;
        apply(mv, out);
        out = mask.asDiagonal() * out;
      };
      return lanczos_extremal(wrapped, n, 90, 2024);
    };

    double idem = masked_extremal([&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
      Eigen::VectorXcd w = pi * v;
      out = pi * w - w;
    });
    double hnorm = masked_extremal(
        [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) { out = hd * v; });
    double comm = masked_extremal([&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
                    out = cplx(0, 1) * (hd * (pi * v) - pi * (hd * v));
                  }) /
                  hnorm;
    double comp = masked_extremal([&](const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
      out = pi * v + pim * v - v;
    });

    r.hbar.push_back(hb);
    r.values[0].push_back(idem);
    r.values[1].push_back(comm);
    r.values[2].push_back(comp);
  }
  fit_slopes(r);
  return r;
}

double spectral_projector_distance(const GridProjector& p, const SpectralDecomposition& spec,
                                   double E) {
  for (long i = 0; i < spec.evals.size(); ++i)
    if (std::abs(spec.evals[i] - E) < 1e-9)
      throw EInSpectrum("E = " + std::to_string(E) + " lies within 1e-9 of a grid eigenvalue");
  Eigen::MatrixXcd pe = spec.projector_above(E);
  if (p.branch == Branch::minus) {
    pe = -pe;
    pe.diagonal().array() += 1.0;
  }
  Eigen::VectorXd mask = bulk_mask(p.grid, default_bulk_margin(p.grid));
  return masked_operator_norm(p.matrix - pe, mask);
}

ScalingReport spectral_distance_report(const DiracSymbolSet& set, Branch branch, int order,
                                       double E, const std::vector<double>& hbars,
                                       const GridFactory& grids) {
  ScalingReport r;
  r.claim = "spectral-projector-distance-order-" + std::to_string(order);
  r.columns = {"distance"};
  r.values.assign(1, {});
  for (double hb : hbars) {
    QuantumGrid g = grids(hb);
    AlmostProjectorSymbol sym = correct_projector_symbol(set, branch, order, g.dim);
    GridProjector p = quantize_and_riesz(set, sym, g);
    SpectralDecomposition spec = SpectralDecomposition::compute(DiracGridHamiltonian::build(set, g));
    r.hbar.push_back(hb);
    r.values[0].push_back(spectral_projector_distance(p, spec, E));
  }
  fit_slopes(r);
  return r;
}

}  // namespace diraclab
