#include "igasens/assembly.hpp"

#include <array>
#include <fmt/format.h>
#include <ostream>

#include "igasens/quadrature.hpp"

namespace igasens {

namespace {

// Per-axis quadrature layout over the element spans of one patch direction.
struct AxisQuadrature {
  std::vector<double> breaks;
  std::vector<std::vector<double>> coords;   // per span, absolute
  std::vector<std::vector<double>> weights;  // per span, scaled by span length
};

AxisQuadrature axis_quadrature(const SplineSpace1D& base, int num_points) {
  AxisQuadrature out;
  out.breaks = base.knots().breakpoints();
  const QuadratureRule1D rule = gauss_legendre(num_points);
  for (std::size_t e = 0; e + 1 < out.breaks.size(); ++e) {
    const double a = out.breaks[e];
    const double len = out.breaks[e + 1] - a;
    std::vector<double> c(rule.points.size());
    std::vector<double> w(rule.points.size());
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      c[q] = a + len * rule.points[q];
      w[q] = len * rule.weights[q];
    }
    out.coords.push_back(std::move(c));
    out.weights.push_back(std::move(w));
  }
  return out;
}

// Values and first derivatives of one 1D space at the quadrature points of
// every span of an axis.
struct AxisTable {
  int degree = 0;
  std::vector<int> first;              // per span
  std::vector<Eigen::MatrixXd> value;  // per span: nq x (degree+1)
  std::vector<Eigen::MatrixXd> deriv;
};

AxisTable tabulate(const SplineSpace1D& space, const AxisQuadrature& quad) {
  AxisTable table;
  table.degree = space.degree();
  for (std::size_t e = 0; e < quad.coords.size(); ++e) {
    const std::size_t nq = quad.coords[e].size();
    Eigen::MatrixXd val(nq, space.degree() + 1);
    Eigen::MatrixXd der(nq, space.degree() + 1);
    int first = 0;
    for (std::size_t q = 0; q < nq; ++q) {
      const auto bd = eval_basis_derivatives(space, quad.coords[e][q], 1);
      first = bd.first;
      val.row(static_cast<Eigen::Index>(q)) = bd.rows.row(0);
      der.row(static_cast<Eigen::Index>(q)) = bd.rows.row(1);
    }
    table.first.push_back(first);
    table.value.push_back(std::move(val));
    table.deriv.push_back(std::move(der));
  }
  return table;
}

// Local basis function bookkeeping for one component on one element.
struct LocalComponent {
  int comp = 0;
  std::vector<long> active;              // global active id or -1
  std::vector<std::array<int, 3>> local; // per-axis offsets into the tables
};

struct QPointBasis {
  // For every local function: scalar value and reference gradient.
  std::vector<double> value;
  std::vector<VecD> grad;
  std::vector<int> comp;
};

double relative_scale(const MatD& m) { return std::max(1.0, m.norm()); }

void check_mapping(double det, const MatD& g, int patch, std::span<const double> xhat) {
  if (!(det > 0.0)) {
    std::string loc = fmt::format("patch {} at (", patch);
    for (std::size_t i = 0; i < xhat.size(); ++i)
      loc += fmt::format("{}{:.4f}", i ? ", " : "", xhat[i]);
    loc += ")";
    throw GeometryError(fmt::format("mapping invalid: det(dG) = {} on {}", det, loc));
  }
  if (det < 1e-13 * relative_scale(g))
    throw SingularityError(
        fmt::format("Jacobian numerically singular (det = {}) on patch {}", det, patch));
}

}  // namespace

AssembledSystem assemble(const DiscreteSpace& space, const MorphGeometry& geom, double t0,
                         int order, int quad_points, AssemblyForm form) {
  if (order < 0 || order > 30) throw DomainError("assemble: order must be in [0, 30]");
  if (space.num_patches() != geom.num_patches())
    throw ValidationError("assemble: space was built for a different geometry");
  const int d = geom.dimension();
  const int n_comp = space.num_components();
  const bool hcurl = space.kind() == ProblemKind::HCurl;
  const int n = space.num_dofs();

  std::vector<std::vector<Eigen::Triplet<double>>> trip_K(static_cast<std::size_t>(order) + 1);
  std::vector<std::vector<Eigen::Triplet<double>>> trip_M(static_cast<std::size_t>(order) + 1);

  for (int p = 0; p < geom.num_patches(); ++p) {
    // Quadrature and basis tables per axis.
    std::array<AxisQuadrature, 3> quad;
    std::array<std::vector<AxisTable>, 3> tables;  // [axis][comp]
    for (int axis = 0; axis < d; ++axis) {
      const int q = quad_points > 0
                        ? quad_points
                        : space.options().degrees[static_cast<std::size_t>(axis)] + 1;
      quad[static_cast<std::size_t>(axis)] = axis_quadrature(space.base_space(p, axis), q);
      for (int c = 0; c < n_comp; ++c)
        tables[static_cast<std::size_t>(axis)].push_back(
            tabulate(space.component_space(p, c).factor(axis), quad[static_cast<std::size_t>(axis)]));
    }

    std::array<std::size_t, 3> n_elems{1, 1, 1};
    for (int axis = 0; axis < d; ++axis)
      n_elems[static_cast<std::size_t>(axis)] = quad[static_cast<std::size_t>(axis)].coords.size();

    std::array<std::size_t, 3> nq{1, 1, 1};
    for (int axis = 0; axis < d; ++axis)
      nq[static_cast<std::size_t>(axis)] = quad[static_cast<std::size_t>(axis)].coords[0].size();
    const std::size_t nq_total = nq[0] * nq[1] * nq[2];

    for (std::size_t e2 = 0; e2 < n_elems[2]; ++e2)
      for (std::size_t e1 = 0; e1 < n_elems[1]; ++e1)
        for (std::size_t e0 = 0; e0 < n_elems[0]; ++e0) {
          const std::array<std::size_t, 3> elem{e0, e1, e2};

          // Collect the element's local functions per component.
          std::vector<LocalComponent> locals;
          int m_total = 0;
          for (int c = 0; c < n_comp; ++c) {
            LocalComponent lc;
            lc.comp = c;
            const TensorSplineSpace& cs = space.component_space(p, c);
            std::array<int, 3> counts{1, 1, 1};
            std::array<int, 3> first{0, 0, 0};
            for (int axis = 0; axis < d; ++axis) {
              const AxisTable& tab =
                  tables[static_cast<std::size_t>(axis)][static_cast<std::size_t>(c)];
              counts[static_cast<std::size_t>(axis)] = tab.degree + 1;
              first[static_cast<std::size_t>(axis)] =
                  tab.first[elem[static_cast<std::size_t>(axis)]];
            }
            for (int l2 = 0; l2 < counts[2]; ++l2)
              for (int l1 = 0; l1 < counts[1]; ++l1)
                for (int l0 = 0; l0 < counts[0]; ++l0) {
                  std::array<int, 3> idx{first[0] + l0, first[1] + l1, first[2] + l2};
                  const long flat =
                      cs.flatten(std::span<const int>(idx.data(), static_cast<std::size_t>(d)));
                  lc.active.push_back(space.active_index(p, c, flat));
                  lc.local.push_back({l0, l1, l2});
                }
            m_total += static_cast<int>(lc.active.size());
            locals.push_back(std::move(lc));
          }

          std::vector<Eigen::MatrixXd> K_loc(static_cast<std::size_t>(order) + 1,
                                             Eigen::MatrixXd::Zero(m_total, m_total));
          std::vector<Eigen::MatrixXd> M_loc(static_cast<std::size_t>(order) + 1,
                                             Eigen::MatrixXd::Zero(m_total, m_total));

          QPointBasis basis;
          basis.value.resize(static_cast<std::size_t>(m_total));
          basis.grad.assign(static_cast<std::size_t>(m_total), VecD::Zero(d));
          basis.comp.resize(static_cast<std::size_t>(m_total));

          for (std::size_t iq = 0; iq < nq_total; ++iq) {
            const std::size_t q0 = iq % nq[0];
            const std::size_t q1 = (iq / nq[0]) % nq[1];
            const std::size_t q2 = iq / (nq[0] * nq[1]);
            const std::array<std::size_t, 3> qidx{q0, q1, q2};

            std::array<double, 3> xhat{0, 0, 0};
            double w = 1.0;
            for (int axis = 0; axis < d; ++axis) {
              const auto a = static_cast<std::size_t>(axis);
              xhat[a] = quad[a].coords[elem[a]][qidx[a]];
              w *= quad[a].weights[elem[a]][qidx[a]];
            }
            const std::span<const double> xview(xhat.data(), static_cast<std::size_t>(d));

            // Scalar values and reference gradients of every local function.
            int row = 0;
            for (const LocalComponent& lc : locals) {
              for (std::size_t l = 0; l < lc.active.size(); ++l, ++row) {
                double value = 1.0;
                VecD grad = VecD::Ones(d);
                for (int axis = 0; axis < d; ++axis) {
                  const auto a = static_cast<std::size_t>(axis);
                  const AxisTable& tab = tables[a][static_cast<std::size_t>(lc.comp)];
                  const auto qi = static_cast<Eigen::Index>(qidx[a]);
                  const int li = lc.local[l][a];
                  value *= tab.value[elem[a]](qi, li);
                  for (int g = 0; g < d; ++g)
                    grad(g) *= (g == axis) ? tab.deriv[elem[a]](qi, li)
                                           : tab.value[elem[a]](qi, li);
                }
                basis.value[static_cast<std::size_t>(row)] = value;
                basis.grad[static_cast<std::size_t>(row)] = grad;
                basis.comp[static_cast<std::size_t>(row)] = lc.comp;
              }
            }

            // Geometry data and the pullback jets.
            const auto jac = geom.morph_jacobians(p, xview);
            MatrixJet G(0, MatD::Zero(d, d));
            double scale = w;
            if (form == AssemblyForm::Reference) {
              G = jet_from_affine(jac.J0, jac.JV, t0, order);
            } else {
              const double det0 = jac.J0.determinant();
              check_mapping(det0, jac.J0, p, xview);
              const MatD JVphys = jac.JV * jac.J0.inverse();
              G = jet_from_affine(MatD::Identity(d, d), JVphys, t0, order);
              scale = w * det0;
              for (int r = 0; r < m_total; ++r)
                basis.grad[static_cast<std::size_t>(r)] =
                    jac.J0.inverse().transpose() * basis.grad[static_cast<std::size_t>(r)];
            }
            check_mapping(G[0].determinant(), G[0], p, xview);

            if (!hcurl) {
              const MatrixJet A = pullback_A_jet(G);
              const ScalarJet det = jet_det(G);
              std::vector<VecD> Ag(static_cast<std::size_t>(m_total), VecD::Zero(d));
              for (int k = 0; k <= order; ++k) {
                for (int i = 0; i < m_total; ++i)
                  Ag[static_cast<std::size_t>(i)] = A[k] * basis.grad[static_cast<std::size_t>(i)];
                for (int i = 0; i < m_total; ++i)
                  for (int j = i; j < m_total; ++j) {
                    K_loc[static_cast<std::size_t>(k)](i, j) +=
                        scale * basis.grad[static_cast<std::size_t>(j)].dot(
                                    Ag[static_cast<std::size_t>(i)]);
                    M_loc[static_cast<std::size_t>(k)](i, j) +=
                        scale * det[k] * basis.value[static_cast<std::size_t>(i)] *
                        basis.value[static_cast<std::size_t>(j)];
                  }
              }
            } else if (d == 3) {
              const MatrixJet A = pullback_A_jet(G);
              const MatrixJet C = pullback_C_jet(G);
              // Vector values and curls of the local functions.
              std::vector<VecD> vec(static_cast<std::size_t>(m_total));
              std::vector<VecD> curl(static_cast<std::size_t>(m_total));
              const MatD J0invT = (form == AssemblyForm::Physical)
                                      ? MatD(jac.J0.inverse().transpose())
                                      : MatD(MatD::Identity(d, d));
              const double det0 = (form == AssemblyForm::Physical) ? jac.J0.determinant() : 1.0;
              for (int r = 0; r < m_total; ++r) {
                const int c = basis.comp[static_cast<std::size_t>(r)];
                // Physical-form gradients were already pushed forward; the
                // reference curl needs the reference gradient, so recompute
                // it from the pushed one when necessary.
                VecD gref = basis.grad[static_cast<std::size_t>(r)];
                if (form == AssemblyForm::Physical) gref = jac.J0.transpose() * gref;
                VecD cu = VecD::Zero(3);
                if (c == 0) {
                  cu(1) = gref(2);
                  cu(2) = -gref(1);
                } else if (c == 1) {
                  cu(0) = -gref(2);
                  cu(2) = gref(0);
                } else {
                  cu(0) = gref(1);
                  cu(1) = -gref(0);
                }
                const double s = basis.value[static_cast<std::size_t>(r)];
                if (form == AssemblyForm::Reference) {
                  vec[static_cast<std::size_t>(r)] = s * VecD::Unit(3, c);
                  curl[static_cast<std::size_t>(r)] = cu;
                } else {
                  vec[static_cast<std::size_t>(r)] = s * J0invT.col(c);
                  curl[static_cast<std::size_t>(r)] = (jac.J0 * cu) / det0;
                }
              }
              std::vector<VecD> Av(static_cast<std::size_t>(m_total), VecD::Zero(3));
              std::vector<VecD> Cc(static_cast<std::size_t>(m_total), VecD::Zero(3));
              for (int k = 0; k <= order; ++k) {
                for (int i = 0; i < m_total; ++i) {
                  Av[static_cast<std::size_t>(i)] = A[k] * vec[static_cast<std::size_t>(i)];
                  Cc[static_cast<std::size_t>(i)] = C[k] * curl[static_cast<std::size_t>(i)];
                }
                for (int i = 0; i < m_total; ++i)
                  for (int j = i; j < m_total; ++j) {
                    K_loc[static_cast<std::size_t>(k)](i, j) +=
                        scale * curl[static_cast<std::size_t>(j)].dot(Cc[static_cast<std::size_t>(i)]);
                    M_loc[static_cast<std::size_t>(k)](i, j) +=
                        scale * vec[static_cast<std::size_t>(j)].dot(Av[static_cast<std::size_t>(i)]);
                  }
              }
            } else {
              // 2D electromagnetic case: scalar curl, C[t] degenerates to
              // 1/det(dG[t]).
              const MatrixJet A = pullback_A_jet(G);
              const ScalarJet recip = jet_recip(jet_det(G));
              std::vector<VecD> vec(static_cast<std::size_t>(m_total));
              std::vector<double> curl(static_cast<std::size_t>(m_total));
              const MatD J0invT = (form == AssemblyForm::Physical)
                                      ? MatD(jac.J0.inverse().transpose())
                                      : MatD(MatD::Identity(d, d));
              const double det0 = (form == AssemblyForm::Physical) ? jac.J0.determinant() : 1.0;
              for (int r = 0; r < m_total; ++r) {
                const int c = basis.comp[static_cast<std::size_t>(r)];
                VecD gref = basis.grad[static_cast<std::size_t>(r)];
                if (form == AssemblyForm::Physical) gref = jac.J0.transpose() * gref;
                const double cu = (c == 0) ? -gref(1) : gref(0);
                const double s = basis.value[static_cast<std::size_t>(r)];
                if (form == AssemblyForm::Reference) {
                  vec[static_cast<std::size_t>(r)] = s * VecD::Unit(2, c);
                  curl[static_cast<std::size_t>(r)] = cu;
                } else {
                  vec[static_cast<std::size_t>(r)] = s * J0invT.col(c);
                  curl[static_cast<std::size_t>(r)] = cu / det0;
                }
              }
              std::vector<VecD> Av(static_cast<std::size_t>(m_total), VecD::Zero(2));
              for (int k = 0; k <= order; ++k) {
                for (int i = 0; i < m_total; ++i)
                  Av[static_cast<std::size_t>(i)] = A[k] * vec[static_cast<std::size_t>(i)];
                for (int i = 0; i < m_total; ++i)
                  for (int j = i; j < m_total; ++j) {
                    K_loc[static_cast<std::size_t>(k)](i, j) +=
                        scale * recip[k] * curl[static_cast<std::size_t>(i)] *
                        curl[static_cast<std::size_t>(j)];
                    M_loc[static_cast<std::size_t>(k)](i, j) +=
                        scale * vec[static_cast<std::size_t>(j)].dot(Av[static_cast<std::size_t>(i)]);
                  }
              }
            }
          }

          // Scatter, mirroring the local upper triangle for exact symmetry.
          std::vector<long> ids;
          ids.reserve(static_cast<std::size_t>(m_total));
          for (const LocalComponent& lc : locals)
            ids.insert(ids.end(), lc.active.begin(), lc.active.end());
          for (int k = 0; k <= order; ++k)
            for (int i = 0; i < m_total; ++i) {
              const long gi = ids[static_cast<std::size_t>(i)];
              if (gi < 0) continue;
              for (int j = i; j < m_total; ++j) {
                const long gj = ids[static_cast<std::size_t>(j)];
                if (gj < 0) continue;
                const double vk = K_loc[static_cast<std::size_t>(k)](i, j);
                const double vm = M_loc[static_cast<std::size_t>(k)](i, j);
                trip_K[static_cast<std::size_t>(k)].emplace_back(static_cast<int>(gi),
                                                                 static_cast<int>(gj), vk);
                trip_M[static_cast<std::size_t>(k)].emplace_back(static_cast<int>(gi),
                                                                 static_cast<int>(gj), vm);
                if (gi != gj) {
                  trip_K[static_cast<std::size_t>(k)].emplace_back(static_cast<int>(gj),
                                                                   static_cast<int>(gi), vk);
                  trip_M[static_cast<std::size_t>(k)].emplace_back(static_cast<int>(gj),
                                                                   static_cast<int>(gi), vm);
                }
              }
            }
        }
  }

  AssembledSystem system;
  system.kind = space.kind();
  system.t0 = t0;
  system.order = order;
  for (int k = 0; k <= order; ++k) {
    Eigen::SparseMatrix<double> K(n, n), M(n, n);
    K.setFromTriplets(trip_K[static_cast<std::size_t>(k)].begin(),
                      trip_K[static_cast<std::size_t>(k)].end());
    M.setFromTriplets(trip_M[static_cast<std::size_t>(k)].begin(),
                      trip_M[static_cast<std::size_t>(k)].end());
    system.K.push_back(std::move(K));
    system.M.push_back(std::move(M));
  }
  return system;
}

DirectSystem assemble_direct(const DiscreteSpace& space, const MorphGeometry& geom, double t,
                             int quad_points, AssemblyForm form) {
  AssembledSystem system = assemble(space, geom, t, 0, quad_points, form);
  return DirectSystem{std::move(system.K[0]), std::move(system.M[0])};
}

Eigen::SparseMatrix<double> discrete_gradient(const DiscreteSpace& h1_space,
                                              const DiscreteSpace& hcurl_space) {
  if (h1_space.kind() != ProblemKind::H1 || hcurl_space.kind() != ProblemKind::HCurl)
    throw ValidationError("discrete_gradient: expects an H1 and an HCurl space");
  if (h1_space.num_patches() != 1 || hcurl_space.num_patches() != 1)
    throw UnsupportedError("discrete_gradient: single patch only");
  const int d = h1_space.dimension();
  for (int axis = 0; axis < d; ++axis)
    if (h1_space.base_space(0, axis).knots().values() !=
        hcurl_space.base_space(0, axis).knots().values())
      throw ValidationError("discrete_gradient: spaces disagree on base knot vectors");

  const TensorSplineSpace& scalar = h1_space.component_space(0, 0);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int c = 0; c < d; ++c) {
    const TensorSplineSpace& comp = hcurl_space.component_space(0, c);
    const auto& knots = h1_space.base_space(0, c).knots();
    const int pc = knots.degree();

    std::array<int, 3> counts{1, 1, 1};
    for (int axis = 0; axis < d; ++axis) counts[static_cast<std::size_t>(axis)] = comp.num_basis(axis);
    for (int k2 = 0; k2 < counts[2]; ++k2)
      for (int k1 = 0; k1 < counts[1]; ++k1)
        for (int k0 = 0; k0 < counts[0]; ++k0) {
          std::array<int, 3> kidx{k0, k1, k2};
          const long row_flat =
              comp.flatten(std::span<const int>(kidx.data(), static_cast<std::size_t>(d)));
          const long row = hcurl_space.active_index(0, c, row_flat);
          if (row < 0) continue;
          const int kc = kidx[static_cast<std::size_t>(c)];
          const double denom = knots[kc + pc + 1] - knots[kc + 1];
          const double alpha = pc / denom;

          std::array<int, 3> up = kidx;
          up[static_cast<std::size_t>(c)] += 1;
          const long col_up = h1_space.active_index(
              0, 0, scalar.flatten(std::span<const int>(up.data(), static_cast<std::size_t>(d))));
          const long col_lo = h1_space.active_index(
              0, 0, scalar.flatten(std::span<const int>(kidx.data(), static_cast<std::size_t>(d))));
          if (col_up >= 0)
            triplets.emplace_back(static_cast<int>(row), static_cast<int>(col_up), alpha);
          if (col_lo >= 0)
            triplets.emplace_back(static_cast<int>(row), static_cast<int>(col_lo), -alpha);
        }
  }
  Eigen::SparseMatrix<double> G(hcurl_space.num_dofs(), h1_space.num_dofs());
  G.setFromTriplets(triplets.begin(), triplets.end());
  return G;
}

void dump_lower_triangle(std::ostream& out, const Eigen::SparseMatrix<double>& matrix) {
  for (int col = 0; col < matrix.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, col); it; ++it)
      if (it.row() >= it.col())
        out << it.row() << " " << it.col() << " " << fmt::format("{:.17g}", it.value()) << "\n";
}

}  // namespace igasens
