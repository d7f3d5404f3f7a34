#include "singdet/synth.hpp"

#include "singdet/null_dist.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <map>

namespace singdet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTorusTube = 0.35;
constexpr double kPinchTube = 0.4;

const std::map<Shape, std::string>& shape_names() {
  static const std::map<Shape, std::string> names{
      {Shape::Circle, "circle"},          {Shape::Sphere, "sphere"},
      {Shape::TwoCircles, "two-circles"}, {Shape::TwoSpheres, "two-spheres"},
      {Shape::SolidBall, "solid-ball"},   {Shape::TwoDisks, "two-disks"},
      {Shape::Cone, "cone"},              {Shape::PinchTorus, "pinch-torus"},
      {Shape::Ellipsoid, "ellipsoid"},    {Shape::Torus, "torus"},
      {Shape::SphereProduct, "sphere-product"}, {Shape::HollowCube, "hollow-cube"},
      {Shape::ThreeDisks, "three-disks"},
  };
  return names;
}

Eigen::RowVectorXd unit_sphere(int ambient, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::RowVectorXd v(ambient);
  double sq = 0.0;
  do {
    for (int j = 0; j < ambient; ++j) v[j] = normal(rng);
    sq = v.squaredNorm();
  } while (sq == 0.0);
  return v / std::sqrt(sq);
}

Eigen::RowVectorXd unit_ball(int d, Rng& rng) {
  return sample_uniform_ball(d, 1, rng).row(0);
}

double norm_of(const Eigen::Ref<const Eigen::RowVectorXd>& x, int begin, int count) {
  return x.segment(begin, count).norm();
}

double pinch_area_element(double u, double v) {
  const double rho = kPinchTube * std::sin(0.5 * u);
  const double drho = 0.5 * kPinchTube * std::cos(0.5 * u);
  const double ring = 1.0 + rho * std::cos(v);
  const Eigen::Vector3d pu(drho * std::cos(v) * std::cos(u) - ring * std::sin(u),
                           drho * std::cos(v) * std::sin(u) + ring * std::cos(u), drho * std::sin(v));
  const Eigen::Vector3d pv(-rho * std::sin(v) * std::cos(u), -rho * std::sin(v) * std::sin(u),
                           rho * std::cos(v));
  return pu.cross(pv).norm();
}

}  // namespace

std::string shape_name(Shape shape) { return shape_names().at(shape); }

Shape parse_shape(const std::string& name) {
  std::string key;
  for (char c : name) key.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(c)));
  const std::map<std::string, std::string> aliases{
      {"twocircles", "two-circles"},   {"twospheres", "two-spheres"}, {"solidball", "solid-ball"},
      {"twodisks", "two-disks"},       {"pinchtorus", "pinch-torus"}, {"sphereproduct", "sphere-product"},
      {"hollowcube", "hollow-cube"},   {"threedisks", "three-disks"}};
  if (auto it = aliases.find(key); it != aliases.end()) key = it->second;
  for (const auto& [shape, n] : shape_names())
    if (n == key) return shape;
  throw InputError("unknown shape '" + name + "'");
}

std::vector<double> ellipsoid_axes(const ShapeSpec& spec) {
  Rng rng(derive_seed(spec.seed, 0xe111950dULL));
  std::uniform_real_distribution<double> axis(0.6, 1.4);
  std::vector<double> axes(static_cast<std::size_t>(spec.dim + 1));
  for (auto& a : axes) a = axis(rng);
  return axes;
}

int ambient_dim(const ShapeSpec& spec) {
  switch (spec.shape) {
    case Shape::Circle:
    case Shape::TwoCircles: return 2;
    case Shape::Sphere:
    case Shape::TwoSpheres:
    case Shape::Ellipsoid: return spec.dim + 1;
    case Shape::SolidBall: return spec.dim;
    case Shape::TwoDisks: return 3 * spec.dim;
    case Shape::SphereProduct: return 4;
    case Shape::Cone:
    case Shape::PinchTorus:
    case Shape::Torus:
    case Shape::HollowCube:
    case Shape::ThreeDisks: return 3;
  }
  return 0;
}

double singular_distance(const ShapeSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  switch (spec.shape) {
    case Shape::Circle:
    case Shape::Sphere:
    case Shape::Ellipsoid:
    case Shape::Torus:
    case Shape::SphereProduct: return kInf;
    case Shape::SolidBall: return std::abs(1.0 - x.norm());
    case Shape::TwoCircles:
    case Shape::TwoSpheres: {
      // Intersection: x_1 = 0, |x_rest| = sqrt(3)/2.
      const double rest = x.size() > 1 ? norm_of(x, 1, static_cast<int>(x.size()) - 1) : 0.0;
      return std::hypot(x[0], rest - std::sqrt(0.75));
    }
    case Shape::TwoDisks: {
      const int d = spec.dim;
      const double a = norm_of(x, 0, d), b = norm_of(x, d, d), c = norm_of(x, 2 * d, d);
      const double shared = std::sqrt(a * a + c * c + std::pow(std::max(0.0, b - 1.0), 2));
      const double rim_a = std::hypot(c, std::hypot(a, b) - 1.0);
      const double rim_b = std::hypot(a, std::hypot(b, c) - 1.0);
      return std::min({shared, rim_a, rim_b});
    }
    case Shape::Cone: return x.norm();
    case Shape::PinchTorus: return std::sqrt(std::pow(x[0] - 1.0, 2) + x[1] * x[1] + x[2] * x[2]);
    case Shape::HollowCube: {
      double best = kInf;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          const int k = 3 - i - j;
          const double e = std::pow(std::abs(x[i]) - 1.0, 2) + std::pow(std::abs(x[j]) - 1.0, 2) +
                           std::pow(std::max(0.0, std::abs(x[k]) - 1.0), 2);
          best = std::min(best, std::sqrt(e));
        }
      return best;
    }
    case Shape::ThreeDisks: {
      double best = kInf;
      for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        // segment on axis a
        best = std::min(best, std::sqrt(x[b] * x[b] + x[c] * x[c] +
                                        std::pow(std::max(0.0, std::abs(x[a]) - 1.0), 2)));
        // rim of the disk in plane (a, b)
        best = std::min(best, std::hypot(x[c], std::hypot(x[a], x[b]) - 1.0));
      }
      return best;
    }
  }
  return kInf;
}

LabeledCloud generate(const ShapeSpec& spec) {
  if (spec.n < 1) throw InputError("synth: n must be positive");
  if (spec.dim < 1) throw InputError("synth: dimension must be positive");
  if (!(spec.noise >= 0.0)) throw InputError("synth: noise must be nonnegative");

  const int ambient = ambient_dim(spec);
  Rng rng(mix_seed(spec.seed));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const std::vector<double> axes = spec.shape == Shape::Ellipsoid ? ellipsoid_axes(spec) : std::vector<double>{};

  Points pts(spec.n, ambient);
  std::vector<double> dist(static_cast<std::size_t>(spec.n));
  for (Index i = 0; i < spec.n; ++i) {
    Eigen::RowVectorXd p = Eigen::RowVectorXd::Zero(ambient);
    switch (spec.shape) {
      case Shape::Circle: p = unit_sphere(2, rng); break;
      case Shape::Sphere: p = unit_sphere(spec.dim + 1, rng); break;
      case Shape::TwoCircles:
      case Shape::TwoSpheres:
        p = unit_sphere(ambient, rng);
        p[0] += coin(rng) ? 0.5 : -0.5;
        break;
      case Shape::SolidBall: p = unit_ball(spec.dim, rng); break;
      case Shape::TwoDisks: {
        const int d = spec.dim;
        p.segment(coin(rng) ? 0 : d, 2 * d) = unit_ball(2 * d, rng);
        break;
      }
      case Shape::Cone: {
        // Unit slant length: |x| = sqrt(2) h <= 1.
        const double h = std::sqrt(unif(rng)) * std::sqrt(0.5);
        const double phi = 2.0 * M_PI * unif(rng);
        p << h * std::cos(phi), h * std::sin(phi), coin(rng) ? h : -h;
        break;
      }
      case Shape::PinchTorus: {
        const double bound = kPinchTube * std::hypot(0.5 * kPinchTube, 1.0 + kPinchTube);
        double u = 0.0, v = 0.0;
        do {
          u = 2.0 * M_PI * unif(rng);
          v = 2.0 * M_PI * unif(rng);
        } while (unif(rng) * bound > pinch_area_element(u, v));
        const double rho = kPinchTube * std::sin(0.5 * u);
        const double ring = 1.0 + rho * std::cos(v);
        p << ring * std::cos(u), ring * std::sin(u), rho * std::sin(v);
        break;
      }
      case Shape::Ellipsoid: {
        // Accept sphere points by the ellipsoid's area stretch |A^-1 u| det A.
        double max_stretch = 0.0;
        for (double a : axes) max_stretch = std::max(max_stretch, 1.0 / a);
        Eigen::RowVectorXd u;
        double stretch = 0.0;
        do {
          u = unit_sphere(ambient, rng);
          stretch = 0.0;
          for (int j = 0; j < ambient; ++j) stretch += std::pow(u[j] / axes[j], 2);
          stretch = std::sqrt(stretch);
        } while (unif(rng) * max_stretch > stretch);
        for (int j = 0; j < ambient; ++j) p[j] = axes[j] * u[j];
        break;
      }
      case Shape::Torus: {
        double v = 0.0;
        do {
          v = 2.0 * M_PI * unif(rng);
        } while (unif(rng) * (1.0 + kTorusTube) > 1.0 + kTorusTube * std::cos(v));
        const double u = 2.0 * M_PI * unif(rng);
        const double ring = 1.0 + kTorusTube * std::cos(v);
        p << ring * std::cos(u), ring * std::sin(u), kTorusTube * std::sin(v);
        break;
      }
      case Shape::SphereProduct: {
        const double a = 2.0 * M_PI * unif(rng), b = 2.0 * M_PI * unif(rng);
        p << std::cos(a), std::sin(a), std::cos(b), std::sin(b);
        break;
      }
      case Shape::HollowCube: {
        const int face = std::uniform_int_distribution<int>(0, 5)(rng);
        const int axis = face / 2;
        for (int j = 0; j < 3; ++j) p[j] = j == axis ? (face % 2 ? 1.0 : -1.0) : 2.0 * unif(rng) - 1.0;
        break;
      }
      case Shape::ThreeDisks: {
        const int plane = std::uniform_int_distribution<int>(0, 2)(rng);
        const Eigen::RowVectorXd q = unit_ball(2, rng);
        p[plane] = q[0];
        p[(plane + 1) % 3] = q[1];
        break;
      }
    }
    dist[static_cast<std::size_t>(i)] = singular_distance(spec, p);
    if (spec.noise > 0.0)
      for (int j = 0; j < ambient; ++j) p[j] += spec.noise * (2.0 * unif(rng) - 1.0);
    pts.row(i) = p;
  }
  return {PointCloud(std::move(pts)), std::move(dist)};
}

Labels ground_truth_labels(const LabeledCloud& labeled, double s) {
  if (!(s > 0.0)) throw InputError("ground truth radius must be positive");
  Labels out(labeled.dist_to_singular.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = labeled.dist_to_singular[i] <= s ? 1 : 0;
  return out;
}

ScaledParams scaled_experiment_params(int d, double r0, double n0, double growth) {
  if (d < 1 || !(r0 > 0.0 && r0 < 1.0) || !(n0 >= 1.0) || !(growth > 1.0))
    throw InputError("scaled_experiment_params: invalid arguments");
  return {std::pow(r0, 1.0 / d), static_cast<Index>(std::llround(n0 * std::pow(growth, d)))};
}

std::vector<BenchmarkCloud> mh_benchmark(Index sample_size, std::uint64_t seed, int instances, double noise) {
  if (sample_size < 100) throw InputError("mh_benchmark: sample size must be at least 100");
  struct Entry {
    Shape shape;
    int dim;
    bool manifold;
  };
  const Entry entries[] = {
      {Shape::Sphere, 2, true},     {Shape::Ellipsoid, 2, true},  {Shape::SphereProduct, 2, true},
      {Shape::Torus, 2, true},      {Shape::TwoSpheres, 2, false}, {Shape::Cone, 2, false},
      {Shape::HollowCube, 2, false}, {Shape::ThreeDisks, 2, false},
  };
  std::vector<BenchmarkCloud> out;
  std::uint64_t stream = 0;
  for (const auto& e : entries) {
    for (int c = 0; c < instances; ++c) {
      ShapeSpec spec{e.shape, e.dim, sample_size, noise, derive_seed(seed, stream++)};
      out.push_back({shape_name(e.shape), e.manifold, generate(spec)});
    }
  }
  return out;
}

}  // namespace singdet
