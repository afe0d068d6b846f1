#include "igasens/jets.hpp"

#include <array>

namespace igasens {

namespace {
constexpr int kMaxBinomial = 40;

const double* binomial_table() {
  static const auto table = [] {
    auto t = std::array<double, (kMaxBinomial + 1) * (kMaxBinomial + 1)>{};
    for (int n = 0; n <= kMaxBinomial; ++n) {
      t[static_cast<std::size_t>(n * (kMaxBinomial + 1))] = 1.0;
      for (int k = 1; k <= n; ++k)
        t[static_cast<std::size_t>(n * (kMaxBinomial + 1) + k)] =
            t[static_cast<std::size_t>((n - 1) * (kMaxBinomial + 1) + k - 1)] +
            ((k <= n - 1) ? t[static_cast<std::size_t>((n - 1) * (kMaxBinomial + 1) + k)] : 0.0);
    }
    return t;
  }();
  return table.data();
}

void check_invertible(const MatD& m, const char* op) {
  const double det = m.determinant();
  const double scale = std::max(1.0, m.norm());
  if (!std::isfinite(det) || std::abs(det) < 1e-300 * scale)
    throw SingularityError(std::string(op) + ": zeroth coefficient is singular");
}

ScalarJet entry_jet(const MatrixJet& a, int i, int j) {
  ScalarJet out(a.order(), 0.0);
  for (int k = 0; k <= a.order(); ++k) out[k] = a[k](i, j);
  return out;
}

ScalarJet jet_sub(const ScalarJet& a, const ScalarJet& b) {
  ScalarJet out(a.order(), 0.0);
  for (int k = 0; k <= a.order(); ++k) out[k] = a[k] - b[k];
  return out;
}

ScalarJet jet_add(const ScalarJet& a, const ScalarJet& b) {
  ScalarJet out(a.order(), 0.0);
  for (int k = 0; k <= a.order(); ++k) out[k] = a[k] + b[k];
  return out;
}
}  // namespace

double binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n || n > kMaxBinomial)
    throw DomainError("binomial: arguments out of range");
  return binomial_table()[static_cast<std::size_t>(n * (kMaxBinomial + 1) + k)];
}

MatrixJet jet_scale(const ScalarJet& s, const MatrixJet& a) {
  if (s.order() != a.order()) throw ValidationError("jet_scale: jet orders do not match");
  MatrixJet out(a.order(), a[0]);
  for (int k = 0; k <= a.order(); ++k) {
    MatD acc = MatD::Zero(a[0].rows(), a[0].cols());
    for (int j = 0; j <= k; ++j) acc += binomial(k, j) * s[j] * a[k - j];
    out[k] = acc;
  }
  return out;
}

MatrixJet jet_transpose(const MatrixJet& a) {
  MatrixJet out(a.order(), a[0]);
  for (int k = 0; k <= a.order(); ++k) out[k] = a[k].transpose();
  return out;
}

MatrixJet jet_inv(const MatrixJet& a) {
  check_invertible(a[0], "jet_inv");
  const MatD inv0 = a[0].inverse();
  MatrixJet out(a.order(), a[0]);
  out[0] = inv0;
  for (int k = 1; k <= a.order(); ++k) {
    MatD acc = MatD::Zero(a[0].rows(), a[0].cols());
    for (int j = 1; j <= k; ++j) acc += binomial(k, j) * a[j] * out[k - j];
    out[k] = -inv0 * acc;
  }
  return out;
}

ScalarJet jet_recip(const ScalarJet& s) {
  if (!std::isfinite(s[0]) || s[0] == 0.0)
    throw SingularityError("jet_recip: zeroth coefficient is zero");
  ScalarJet out(s.order(), 0.0);
  out[0] = 1.0 / s[0];
  for (int k = 1; k <= s.order(); ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += binomial(k, j) * s[j] * out[k - j];
    out[k] = -acc / s[0];
  }
  return out;
}

ScalarJet jet_det(const MatrixJet& a) {
  const int d = static_cast<int>(a[0].rows());
  if (d != static_cast<int>(a[0].cols())) throw ValidationError("jet_det: matrix not square");
  switch (d) {
    case 1:
      return entry_jet(a, 0, 0);
    case 2:
      return jet_sub(jet_mul(entry_jet(a, 0, 0), entry_jet(a, 1, 1)),
                     jet_mul(entry_jet(a, 0, 1), entry_jet(a, 1, 0)));
    case 3: {
      const auto cof = [&](int r0, int r1, int c0, int c1) {
        return jet_sub(jet_mul(entry_jet(a, r0, c0), entry_jet(a, r1, c1)),
                       jet_mul(entry_jet(a, r0, c1), entry_jet(a, r1, c0)));
      };
      ScalarJet t0 = jet_mul(entry_jet(a, 0, 0), cof(1, 2, 1, 2));
      ScalarJet t1 = jet_mul(entry_jet(a, 0, 1), cof(1, 2, 0, 2));
      ScalarJet t2 = jet_mul(entry_jet(a, 0, 2), cof(1, 2, 0, 1));
      return jet_add(jet_sub(t0, t1), t2);
    }
    default:
      throw UnsupportedError("jet_det: spatial dimension capped at 3");
  }
}

MatrixJet jet_from_affine(const MatD& J0, const MatD& JV, double t0, int order) {
  MatrixJet out(order, J0);
  out[0] = J0 + t0 * JV;
  if (order >= 1) out[1] = JV;
  return out;
}

MatrixJet pullback_A_jet(const MatrixJet& G) {
  const MatrixJet inv = jet_inv(G);
  return jet_scale(jet_det(G), jet_mul(inv, jet_transpose(inv)));
}

MatrixJet pullback_C_jet(const MatrixJet& G) {
  return jet_scale(jet_recip(jet_det(G)), jet_mul(jet_transpose(G), G));
}

PullbackRates pullback_first_derivative(const MatD& G0, const MatD& JV, double t) {
  const MatD Gt = G0 + t * JV;
  check_invertible(Gt, "pullback_first_derivative");
  const MatD Gi = Gt.inverse();
  const double det = Gt.determinant();
  const double tr1 = (JV * Gi).trace();

  const MatD A = det * Gi * Gi.transpose();
  const MatD C = (Gt.transpose() * Gt) / det;

  PullbackRates out;
  out.det_rate = tr1 * det;
  const MatD GiJvA = Gi * JV * A;
  out.A_rate = tr1 * A - GiJvA - GiJvA.transpose();
  const MatD JvTG = JV.transpose() * Gt;
  out.C_rate = -tr1 * C + (JvTG + JvTG.transpose()) / det;
  return out;
}

MatD pullback_C_second_derivative(const MatD& G0, const MatD& JV, double t) {
  const MatD Gt = G0 + t * JV;
  check_invertible(Gt, "pullback_C_second_derivative");
  const MatD Gi = Gt.inverse();
  const double det = Gt.determinant();
  const MatD W = JV * Gi;
  const double tr1 = W.trace();
  const double tr2 = (W * W).trace();

  const MatD C = (Gt.transpose() * Gt) / det;
  const MatD JvTG = JV.transpose() * Gt;
  const MatD C_rate = -tr1 * C + (JvTG + JvTG.transpose()) / det;

  return tr2 * C - tr1 * C_rate - (tr1 / det) * (JvTG + JvTG.transpose()) +
         (2.0 / det) * (JV.transpose() * JV);
}

MatD pullback_C_third_derivative(const MatD& G0, const MatD& JV, double t) {
  const MatD Gt = G0 + t * JV;
  check_invertible(Gt, "pullback_C_third_derivative");
  const MatD Gi = Gt.inverse();
  const double det = Gt.determinant();
  const MatD W = JV * Gi;
  const double tr1 = W.trace();
  const double tr2 = (W * W).trace();
  const double tr3 = (W * W * W).trace();
  const double q = tr1 * tr1 + tr2;

  const MatD GtTG = Gt.transpose() * Gt;
  const MatD JvTG = JV.transpose() * Gt;
  const MatD GTJv = Gt.transpose() * JV;
  const MatD JvTJv = JV.transpose() * JV;

  return ((-tr1 * q - 2.0 * (tr1 * tr2 + tr3)) / det) * GtTG -
         (6.0 * tr1 / det) * JvTJv + (3.0 * q / det) * JvTG + (3.0 * q / det) * GTJv;
}

}  // namespace igasens
