#include "igasens/geometry.hpp"

#include <array>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace igasens {

namespace {

constexpr double kCoincidenceTol = 1e-12;

std::array<int, 3> unflatten(const TensorSplineSpace& space, long flat) {
  std::array<int, 3> idx{0, 0, 0};
  for (int axis = 0; axis < space.dim_space(); ++axis) {
    const int n = space.num_basis(axis);
    idx[static_cast<std::size_t>(axis)] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

void validate_patch(const Patch& patch, int index) {
  const long n = patch.space.dim();
  if (static_cast<long>(patch.weights.size()) != n)
    throw ValidationError(fmt::format("patch {}: expected {} weights, got {}", index, n,
                                      patch.weights.size()));
  if (static_cast<long>(patch.points.size()) != n)
    throw ValidationError(fmt::format("patch {}: expected {} control points, got {}", index, n,
                                      patch.points.size()));
  for (double w : patch.weights)
    if (!(w > 0.0))
      throw ValidationError(fmt::format("patch {}: weights must be positive", index));
}

}  // namespace

MorphGeometry::MorphGeometry(std::vector<Patch> patches_start,
                             std::vector<std::vector<VecD>> points_end,
                             std::vector<Interface> interfaces)
    : patches_(std::move(patches_start)),
      points_end_(std::move(points_end)),
      interfaces_(std::move(interfaces)) {
  if (patches_.empty()) throw ValidationError("geometry: needs at least one patch");
  dim_ = patches_.front().space.dim_space();
  if (points_end_.size() != patches_.size())
    throw ValidationError("geometry: points_end must match the number of patches");
  for (std::size_t p = 0; p < patches_.size(); ++p) {
    if (patches_[p].space.dim_space() != dim_)
      throw ValidationError("geometry: all patches must share the spatial dimension");
    validate_patch(patches_[p], static_cast<int>(p));
    if (points_end_[p].size() != patches_[p].points.size())
      throw ValidationError(fmt::format(
          "patch {}: points_end layout differs from points_start", p));
  }

  // Interfaces: control nets must coincide point-by-point under the declared
  // orientation, with equal weights and matching tangential knot vectors.
  for (std::size_t k = 0; k < interfaces_.size(); ++k) {
    const Interface& itf = interfaces_[k];
    const auto bad = [&](const std::string& why) {
      return ValidationError(fmt::format("interface {}: {}", k, why));
    };
    if (itf.patch_a < 0 || itf.patch_a >= num_patches() || itf.patch_b < 0 ||
        itf.patch_b >= num_patches())
      throw bad("patch index out of range");
    if (itf.face_a < 0 || itf.face_a >= 2 * dim_ || itf.face_b < 0 || itf.face_b >= 2 * dim_)
      throw bad("face index out of range");
    const Patch& a = patches_[static_cast<std::size_t>(itf.patch_a)];
    const Patch& b = patches_[static_cast<std::size_t>(itf.patch_b)];

    const auto idx_a = face_indices(a.space, itf.face_a);
    const auto idx_b = orient_face_indices(b.space, itf.face_b, itf.orientation);
    if (idx_a.size() != idx_b.size()) throw bad("face dof counts differ");
    for (std::size_t i = 0; i < idx_a.size(); ++i) {
      const VecD pa = a.points[static_cast<std::size_t>(idx_a[i])];
      const VecD pb = b.points[static_cast<std::size_t>(idx_b[i])];
      if ((pa - pb).norm() > kCoincidenceTol)
        throw bad(fmt::format("control points do not coincide at face position {}", i));
      const double wa = a.weights[static_cast<std::size_t>(idx_a[i])];
      const double wb = b.weights[static_cast<std::size_t>(idx_b[i])];
      if (std::abs(wa - wb) > kCoincidenceTol)
        throw bad(fmt::format("weights do not match at face position {}", i));
      const VecD ea = points_end_[static_cast<std::size_t>(itf.patch_a)][static_cast<std::size_t>(idx_a[i])];
      const VecD eb = points_end_[static_cast<std::size_t>(itf.patch_b)][static_cast<std::size_t>(idx_b[i])];
      if ((ea - eb).norm() > kCoincidenceTol)
        throw bad(fmt::format("end control points do not coincide at face position {}", i));
    }
  }
}

const Patch& MorphGeometry::patch(int p) const {
  if (p < 0 || p >= num_patches())
    throw DomainError(fmt::format("patch index {} out of range [0, {})", p, num_patches()));
  return patches_[static_cast<std::size_t>(p)];
}

const std::vector<VecD>& MorphGeometry::points_end(int p) const {
  patch(p);
  return points_end_[static_cast<std::size_t>(p)];
}

bool MorphGeometry::has_morph() const {
  for (std::size_t p = 0; p < patches_.size(); ++p)
    for (std::size_t i = 0; i < patches_[p].points.size(); ++i)
      if ((patches_[p].points[i] - points_end_[p][i]).norm() > 0.0) return true;
  return false;
}

VecD MorphGeometry::point_at(int p, long flat, double t) const {
  const VecD& p0 = patches_[static_cast<std::size_t>(p)].points[static_cast<std::size_t>(flat)];
  const VecD& p1 = points_end_[static_cast<std::size_t>(p)][static_cast<std::size_t>(flat)];
  return (1.0 - t) * p0 + t * p1;
}

RationalBasis MorphGeometry::rational_basis(int p, std::span<const double> xhat) const {
  const Patch& pa = patch(p);
  const int d = dim_;
  if (static_cast<int>(xhat.size()) != d)
    throw ValidationError("rational_basis: parameter dimension mismatch");

  std::array<ActiveBasisDerivatives, 3> basis;
  for (int axis = 0; axis < d; ++axis)
    basis[static_cast<std::size_t>(axis)] =
        eval_basis_derivatives(pa.space.factor(axis), xhat[static_cast<std::size_t>(axis)], 1);

  std::array<int, 3> counts{1, 1, 1};
  for (int axis = 0; axis < d; ++axis)
    counts[static_cast<std::size_t>(axis)] = pa.space.factor(axis).degree() + 1;
  const int n_active = counts[0] * counts[1] * counts[2];

  RationalBasis out;
  out.indices.resize(static_cast<std::size_t>(n_active));
  out.values.resize(static_cast<std::size_t>(n_active));
  out.gradients.assign(static_cast<std::size_t>(n_active), VecD::Zero(d));

  // First pass: weighted spline values/gradients and the rational denominator.
  double weight_sum = 0.0;
  VecD weight_grad = VecD::Zero(d);
  int a = 0;
  std::array<int, 3> idx{0, 0, 0};
  for (int k = 0; k < counts[2]; ++k)
    for (int j = 0; j < counts[1]; ++j)
      for (int i = 0; i < counts[0]; ++i, ++a) {
        const std::array<int, 3> local{i, j, k};
        double value = 1.0;
        VecD grad = VecD::Ones(d);
        for (int axis = 0; axis < d; ++axis) {
          const auto& bd = basis[static_cast<std::size_t>(axis)];
          const int l = local[static_cast<std::size_t>(axis)];
          value *= bd.rows(0, l);
          for (int g = 0; g < d; ++g)
            grad(g) *= (g == axis) ? bd.rows(1, l) : bd.rows(0, l);
          idx[static_cast<std::size_t>(axis)] = bd.first + l;
        }
        const long flat = pa.space.flatten(std::span<const int>(idx.data(), static_cast<std::size_t>(d)));
        const double w = pa.weights[static_cast<std::size_t>(flat)];
        out.indices[static_cast<std::size_t>(a)] = flat;
        out.values[static_cast<std::size_t>(a)] = w * value;
        out.gradients[static_cast<std::size_t>(a)] = w * grad;
        weight_sum += w * value;
        weight_grad += w * grad;
      }

  // Second pass: divide through, R = wB/W, grad R = (w gradB - R gradW)/W.
  for (int m = 0; m < n_active; ++m) {
    const double r = out.values[static_cast<std::size_t>(m)] / weight_sum;
    out.values[static_cast<std::size_t>(m)] = r;
    out.gradients[static_cast<std::size_t>(m)] =
        (out.gradients[static_cast<std::size_t>(m)] - r * weight_grad) / weight_sum;
  }
  return out;
}

VecD MorphGeometry::map_point(int p, double t, std::span<const double> xhat) const {
  const RationalBasis rb = rational_basis(p, xhat);
  VecD x = VecD::Zero(dim_);
  for (std::size_t m = 0; m < rb.indices.size(); ++m)
    x += rb.values[m] * point_at(p, rb.indices[m], t);
  return x;
}

MatD MorphGeometry::jacobian(int p, double t, std::span<const double> xhat) const {
  const RationalBasis rb = rational_basis(p, xhat);
  MatD jac = MatD::Zero(dim_, dim_);
  for (std::size_t m = 0; m < rb.indices.size(); ++m)
    jac += point_at(p, rb.indices[m], t) * rb.gradients[m].transpose();
  return jac;
}

MatD MorphGeometry::jacobian_start(int p, std::span<const double> xhat) const {
  return jacobian(p, 0.0, xhat);
}

MatD MorphGeometry::velocity_jacobian(int p, std::span<const double> xhat) const {
  const RationalBasis rb = rational_basis(p, xhat);
  MatD jac = MatD::Zero(dim_, dim_);
  for (std::size_t m = 0; m < rb.indices.size(); ++m) {
    const VecD delta = points_end_[static_cast<std::size_t>(p)][static_cast<std::size_t>(rb.indices[m])] -
                       patches_[static_cast<std::size_t>(p)].points[static_cast<std::size_t>(rb.indices[m])];
    jac += delta * rb.gradients[m].transpose();
  }
  return jac;
}

MorphGeometry::MorphJacobians MorphGeometry::morph_jacobians(int p,
                                                             std::span<const double> xhat) const {
  const RationalBasis rb = rational_basis(p, xhat);
  MorphJacobians out;
  out.J0 = MatD::Zero(dim_, dim_);
  out.JV = MatD::Zero(dim_, dim_);
  for (std::size_t m = 0; m < rb.indices.size(); ++m) {
    const VecD& p0 = patches_[static_cast<std::size_t>(p)].points[static_cast<std::size_t>(rb.indices[m])];
    const VecD& p1 = points_end_[static_cast<std::size_t>(p)][static_cast<std::size_t>(rb.indices[m])];
    out.J0 += p0 * rb.gradients[m].transpose();
    out.JV += (p1 - p0) * rb.gradients[m].transpose();
  }
  return out;
}

ValidityReport MorphGeometry::validate_mapping(double t, int samples_per_element) const {
  if (samples_per_element < 1)
    throw DomainError("validate_mapping: samples_per_element must be >= 1");
  ValidityReport report;
  report.min_det = std::numeric_limits<double>::infinity();

  for (int p = 0; p < num_patches(); ++p) {
    const Patch& pa = patch(p);
    std::array<std::vector<double>, 3> breaks;
    for (int axis = 0; axis < dim_; ++axis)
      breaks[static_cast<std::size_t>(axis)] = pa.space.factor(axis).knots().breakpoints();

    // Per-axis sample coordinates over every span (span endpoints included
    // when more than one sample is requested).
    std::array<std::vector<double>, 3> samples;
    for (int axis = 0; axis < dim_; ++axis) {
      auto& s = samples[static_cast<std::size_t>(axis)];
      const auto& brk = breaks[static_cast<std::size_t>(axis)];
      for (std::size_t e = 0; e + 1 < brk.size(); ++e) {
        const double a = brk[e], b = brk[e + 1];
        if (samples_per_element == 1) {
          s.push_back(0.5 * (a + b));
        } else {
          for (int i = 0; i < samples_per_element; ++i)
            s.push_back(a + (b - a) * i / (samples_per_element - 1.0));
        }
      }
      if (samples_per_element > 1) s.push_back(brk.back());
    }

    std::array<std::size_t, 3> counts{1, 1, 1};
    for (int axis = 0; axis < dim_; ++axis)
      counts[static_cast<std::size_t>(axis)] = samples[static_cast<std::size_t>(axis)].size();
    std::array<double, 3> xhat{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < counts[2]; ++k)
      for (std::size_t j = 0; j < counts[1]; ++j)
        for (std::size_t i = 0; i < counts[0]; ++i) {
          xhat[0] = samples[0][i];
          if (dim_ > 1) xhat[1] = samples[1][j];
          if (dim_ > 2) xhat[2] = samples[2][k];
          const double det =
              jacobian(p, t, std::span<const double>(xhat.data(), static_cast<std::size_t>(dim_)))
                  .determinant();
          report.min_det = std::min(report.min_det, det);
        }
  }
  report.valid = report.min_det > 0.0;
  return report;
}

std::vector<long> face_indices(const TensorSplineSpace& space, int face) {
  const int d = space.dim_space();
  if (face < 0 || face >= 2 * d) throw DomainError("face index out of range");
  const int axis = face / 2;
  const int side = face % 2;
  const int fixed = (side == 0) ? 0 : space.num_basis(axis) - 1;

  std::vector<int> tangential;
  for (int a = 0; a < d; ++a)
    if (a != axis) tangential.push_back(a);

  std::vector<long> out;
  std::array<int, 3> idx{0, 0, 0};
  idx[static_cast<std::size_t>(axis)] = fixed;
  if (tangential.empty()) {
    out.push_back(space.flatten(std::span<const int>(idx.data(), static_cast<std::size_t>(d))));
    return out;
  }
  const int n0 = space.num_basis(tangential[0]);
  const int n1 = (tangential.size() > 1) ? space.num_basis(tangential[1]) : 1;
  for (int j = 0; j < n1; ++j)
    for (int i = 0; i < n0; ++i) {
      idx[static_cast<std::size_t>(tangential[0])] = i;
      if (tangential.size() > 1) idx[static_cast<std::size_t>(tangential[1])] = j;
      out.push_back(space.flatten(std::span<const int>(idx.data(), static_cast<std::size_t>(d))));
    }
  return out;
}

std::vector<long> orient_face_indices(const TensorSplineSpace& space_b, int face_b,
                                      int orientation) {
  std::vector<long> idx = face_indices(space_b, face_b);
  const int d = space_b.dim_space();
  if (d <= 1) return idx;
  if (d == 2) {
    if (orientation == 0) return idx;
    if (orientation == 1) {
      std::reverse(idx.begin(), idx.end());
      return idx;
    }
    throw UnsupportedError("interface orientation must be 0 or 1 in 2D");
  }
  if (orientation == 0) return idx;
  throw UnsupportedError("3D interfaces support orientation 0 only");
}

namespace {

using nlohmann::json;

std::vector<double> doubles_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError(where + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

MorphGeometry geometry_from_json(const json& root) {
  if (!root.contains("dimension") || !root["dimension"].is_number_integer())
    throw ValidationError("geometry: missing integer field 'dimension'");
  const int d = root["dimension"].get<int>();
  if (d < 1 || d > 3) throw ValidationError("geometry: dimension must be 1, 2, or 3");
  if (!root.contains("patches") || !root["patches"].is_array() || root["patches"].empty())
    throw ValidationError("geometry: missing non-empty array 'patches'");

  std::vector<Patch> patches;
  std::vector<std::vector<VecD>> ends;
  int pi = 0;
  for (const auto& jp : root["patches"]) {
    const std::string where = fmt::format("patches[{}]", pi);
    for (const char* field : {"degrees", "knots", "weights", "points_start"})
      if (!jp.contains(field))
        throw ValidationError(fmt::format("{}: missing field '{}'", where, field));

    const auto degrees = jp["degrees"];
    const auto knots = jp["knots"];
    if (!degrees.is_array() || static_cast<int>(degrees.size()) != d)
      throw ValidationError(where + ".degrees: expected one degree per dimension");
    if (!knots.is_array() || static_cast<int>(knots.size()) != d)
      throw ValidationError(where + ".knots: expected one knot vector per dimension");

    std::vector<SplineSpace1D> factors;
    for (int axis = 0; axis < d; ++axis) {
      const int p = degrees[static_cast<std::size_t>(axis)].get<int>();
      auto values = doubles_from(knots[static_cast<std::size_t>(axis)],
                                 fmt::format("{}.knots[{}]", where, axis));
      try {
        factors.emplace_back(KnotVector(std::move(values), p));
      } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}.knots[{}]: {}", where, axis, e.what()));
      }
    }
    TensorSplineSpace space(std::move(factors));

    auto weights = doubles_from(jp["weights"], where + ".weights");

    const auto read_points = [&](const json& arr, const std::string& name) {
      if (!arr.is_array()) throw ValidationError(name + ": expected an array of points");
      std::vector<VecD> pts;
      pts.reserve(arr.size());
      for (const auto& jpt : arr) {
        auto coords = doubles_from(jpt, name);
        if (static_cast<int>(coords.size()) != d)
          throw ValidationError(name + ": point dimension mismatch");
        VecD v(d);
        for (int c = 0; c < d; ++c) v(c) = coords[static_cast<std::size_t>(c)];
        pts.push_back(v);
      }
      return pts;
    };
    auto start = read_points(jp["points_start"], where + ".points_start");
    auto end = jp.contains("points_end") ? read_points(jp["points_end"], where + ".points_end")
                                         : start;

    patches.push_back(Patch{std::move(space), std::move(weights), std::move(start)});
    ends.push_back(std::move(end));
    ++pi;
  }

  std::vector<Interface> interfaces;
  if (root.contains("interfaces")) {
    int ii = 0;
    for (const auto& ji : root["interfaces"]) {
      const std::string where = fmt::format("interfaces[{}]", ii);
      for (const char* field : {"patch_a", "face_a", "patch_b", "face_b", "orientation"})
        if (!ji.contains(field) || !ji[field].is_number_integer())
          throw ValidationError(fmt::format("{}: missing integer field '{}'", where, field));
      interfaces.push_back(Interface{ji["patch_a"].get<int>(), ji["face_a"].get<int>(),
                                     ji["patch_b"].get<int>(), ji["face_b"].get<int>(),
                                     ji["orientation"].get<int>()});
      ++ii;
    }
  }
  return MorphGeometry(std::move(patches), std::move(ends), std::move(interfaces));
}

}  // namespace

MorphGeometry parse_geometry(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("geometry JSON parse error: {}", e.what()));
  }
  return geometry_from_json(root);
}

MorphGeometry load_geometry(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError(fmt::format("cannot open geometry file '{}'", file.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_geometry(buffer.str());
}

std::string geometry_to_json(const MorphGeometry& geom) {
  json root;
  root["dimension"] = geom.dimension();
  root["patches"] = json::array();
  for (int p = 0; p < geom.num_patches(); ++p) {
    const Patch& pa = geom.patch(p);
    json jp;
    json degrees = json::array();
    json knots = json::array();
    for (int axis = 0; axis < geom.dimension(); ++axis) {
      degrees.push_back(pa.space.factor(axis).degree());
      knots.push_back(pa.space.factor(axis).knots().values());
    }
    jp["degrees"] = degrees;
    jp["knots"] = knots;
    jp["weights"] = pa.weights;
    const auto points_json = [&](const std::vector<VecD>& pts) {
      json arr = json::array();
      for (const VecD& v : pts) {
        json jv = json::array();
        for (int c = 0; c < v.size(); ++c) jv.push_back(v(c));
        arr.push_back(jv);
      }
      return arr;
    };
    jp["points_start"] = points_json(pa.points);
    jp["points_end"] = points_json(geom.points_end(p));
    root["patches"].push_back(jp);
  }
  root["interfaces"] = json::array();
  for (const Interface& itf : geom.interfaces()) {
    root["interfaces"].push_back(json{{"patch_a", itf.patch_a},
                                      {"face_a", itf.face_a},
                                      {"patch_b", itf.patch_b},
                                      {"face_b", itf.face_b},
                                      {"orientation", itf.orientation}});
  }
  return root.dump(2);
}

void save_geometry(const MorphGeometry& geom, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw ValidationError(fmt::format("cannot open '{}' for writing", file.string()));
  out << geometry_to_json(geom) << "\n";
}

}  // namespace igasens
