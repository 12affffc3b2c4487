#include "rdlab/point_measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rdlab/io.hpp"
#include "rdlab/spatial_index.hpp"

namespace rdlab {

namespace {

void check_dims(int n, double d) {
  if (n < 2 || n > kMaxDim) throw std::invalid_argument("measure: ambient dimension out of range");
  if (!(d > 0.0) || !(d < n)) throw std::invalid_argument("measure: need 0 < d < n");
}

double bounding_extent(const PointMeasure& m) {
  double e = 0.0;
  for (std::size_t i = 0; i < m.coords.size(); ++i) e = std::max(e, std::abs(m.coords[i]));
  return e;
}

}  // namespace

void PointMeasure::validate() const {
  check_dims(ambient_dim, hausdorff_dim);
  if (weights.empty()) throw std::invalid_argument("measure: empty point list");
  if (coords.size() != weights.size() * static_cast<std::size_t>(ambient_dim))
    throw std::invalid_argument("measure: coordinate/weight size mismatch");
  if (!(spacing > 0.0)) throw std::invalid_argument("measure: spacing must be positive");
  double sum = 0.0;
  for (const double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("measure: weights must be strictly positive");
    sum += w;
  }
  if (std::abs(sum - total_mass) > 1e-12 * std::max(1.0, std::abs(total_mass)))
    throw std::invalid_argument("measure: total_mass does not match the weight sum");

  // Spacing sanity on a deterministic sample: h must not exceed 4x the
  // nearest-neighbor gap of any sampled point.
  if (count() > 1) {
    const std::size_t samples = std::min<std::size_t>(count(), 32);
    const std::size_t stride = std::max<std::size_t>(1, count() / samples);
    for (std::size_t i = 0; i < count(); i += stride) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < count(); ++j) {
        if (j == i) continue;
        best = std::min(best, dist2(point(i), point(j)));
      }
      if (spacing > 4.0 * std::sqrt(best) + 1e-300)
        throw std::invalid_argument("measure: spacing exceeds 4x sampled nearest-neighbor gap");
    }
  }
}

double GraphProfile::value(double u) const {
  const double w = wavelength;
  if (name == "sine") return amplitude * std::sin(2.0 * M_PI * u / w);
  if (name == "sawtooth") {
    // Triangle wave of amplitude a and period w.
    double t = u / w - std::floor(u / w);  // [0,1)
    return amplitude * (t < 0.5 ? 4.0 * t - 1.0 : 3.0 - 4.0 * t);
  }
  if (name == "bump") return amplitude * std::exp(-u * u / (2.0 * w * w));
  throw std::invalid_argument("graph profile: unknown name '" + name + "'");
}

double GraphProfile::slope(double u) const {
  const double w = wavelength;
  if (name == "sine") return amplitude * (2.0 * M_PI / w) * std::cos(2.0 * M_PI * u / w);
  if (name == "sawtooth") {
    double t = u / w - std::floor(u / w);
    return amplitude * (t < 0.5 ? 4.0 : -4.0) / w;
  }
  if (name == "bump") return -amplitude * (u / (w * w)) * std::exp(-u * u / (2.0 * w * w));
  throw std::invalid_argument("graph profile: unknown name '" + name + "'");
}

double GraphProfile::lipschitz() const {
  const double w = wavelength;
  if (name == "sine") return amplitude * 2.0 * M_PI / w;
  if (name == "sawtooth") return 4.0 * amplitude / w;
  if (name == "bump") return amplitude / w * std::exp(-0.5);
  throw std::invalid_argument("graph profile: unknown name '" + name + "'");
}

PointMeasure gen_flat_plane(int n, int d, double density, double extent, double spacing) {
  check_dims(n, d);
  if (!(density > 0.0)) throw std::invalid_argument("flat plane: density must be positive");
  if (!(spacing > 0.0) || !(extent >= 10.0 * spacing))
    throw std::invalid_argument("flat plane: need extent >= 10*spacing");

  const long per_axis = std::lround(2.0 * extent / spacing);
  const double h = 2.0 * extent / static_cast<double>(per_axis);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(per_axis + 1);

  PointMeasure m;
  m.ambient_dim = n;
  m.hausdorff_dim = d;
  m.spacing = h;
  m.coords.resize(total * n, 0.0);
  const double w = density * std::pow(h, d);
  m.weights.assign(total, w);

  std::vector<long> idx(d, 0);
  for (std::size_t i = 0; i < total; ++i) {
    double* p = m.coords.data() + i * n;
    for (int a = 0; a < d; ++a) p[a] = -extent + h * static_cast<double>(idx[a]);
    for (int a = 0; a < d; ++a) {
      if (++idx[a] <= per_axis) break;
      idx[a] = 0;
    }
  }
  m.total_mass = w * static_cast<double>(total);
  m.extent = extent;
  m.truncated = true;
  m.reg_upper = density * std::pow(2.0, d);  // mu(B(Q,r)) <= density*(2r)^d on a d-plane
  std::ostringstream lbl;
  lbl << "flat-plane d=" << d << " n=" << n << " lambda=" << density;
  m.label = lbl.str();
  return m;
}

PointMeasure gen_four_corner_cantor(int generation, double scale, int embed_dim,
                                    std::size_t point_budget) {
  if (generation < 1) throw std::invalid_argument("cantor: generation must be >= 1");
  if (embed_dim < 2 || embed_dim > kMaxDim)
    throw std::invalid_argument("cantor: embedding dimension out of range");
  if (!(scale > 0.0)) throw std::invalid_argument("cantor: scale must be positive");
  if (generation > 20 || (std::size_t{1} << (2 * generation)) > point_budget)
    throw std::length_error("cantor: 4^k exceeds the configured point budget");

  const std::size_t total = std::size_t{1} << (2 * generation);
  const int n = embed_dim;

  PointMeasure m;
  m.ambient_dim = n;
  m.hausdorff_dim = 1.0;
  m.coords.resize(total * n, 0.0);
  const double w = scale * std::pow(0.25, generation);
  m.weights.assign(total, w);
  m.spacing = w;  // side of a generation-k square
  m.total_mass = scale;

  const double side_k = scale * std::pow(0.25, generation);
  for (std::size_t i = 0; i < total; ++i) {
    double cx = 0.0, cy = 0.0;
    double cell = scale;
    std::size_t digits = i;
    for (int level = 0; level < generation; ++level) {
      const unsigned corner = digits & 3u;
      digits >>= 2;
      cell *= 0.25;
      // Corner offsets 0 or 3*cell inside the current square.
      cx += (corner & 1u) ? 3.0 * cell : 0.0;
      cy += (corner & 2u) ? 3.0 * cell : 0.0;
    }
    double* p = m.coords.data() + i * n;
    p[0] = cx + 0.5 * side_k;
    p[1] = cy + 0.5 * side_k;
  }
  m.extent = scale;
  m.truncated = false;  // the whole set fits in the window
  m.reg_upper = 4.0;    // coarse upper density for the corner system
  std::ostringstream lbl;
  lbl << "four-corner-cantor k=" << generation << " scale=" << scale << " n=" << n;
  m.label = lbl.str();
  return m;
}

PointMeasure gen_lipschitz_graph(int n, int d, const GraphProfile& profile,
                                 double extent, double spacing) {
  check_dims(n, d);
  if (d + 1 > n) throw std::invalid_argument("graph: need room for the graph coordinate");
  PointMeasure m = gen_flat_plane(n, d, 1.0, extent, spacing);
  const double h = m.spacing;
  double mass = 0.0;
  for (std::size_t i = 0; i < m.count(); ++i) {
    double* p = m.coords.data() + i * n;
    const double u = p[0];  // profile varies along the first plane coordinate
    p[d] = profile.value(u);
    const double s = profile.slope(u);
    const double element = std::sqrt(1.0 + s * s);
    m.weights[i] = element * std::pow(h, d);
    mass += m.weights[i];
  }
  m.total_mass = mass;
  m.reg_upper = std::pow(2.0, d) * std::sqrt(1.0 + profile.lipschitz() * profile.lipschitz());
  std::ostringstream lbl;
  lbl << "graph " << profile.name << " a=" << profile.amplitude << " w=" << profile.wavelength
      << " L=" << profile.lipschitz() << " d=" << d << " n=" << n;
  m.label = lbl.str();
  return m;
}

PointMeasure gen_sphere(int n, int d, double rho, double spacing) {
  check_dims(n, d);
  if (!(rho > 0.0) || !(spacing > 0.0) || spacing >= rho)
    throw std::invalid_argument("sphere: need 0 < spacing < rho");

  PointMeasure m;
  m.ambient_dim = n;
  m.hausdorff_dim = d;

  if (d == 1) {
    const long count = std::max<long>(8, std::lround(2.0 * M_PI * rho / spacing));
    const double w = 2.0 * M_PI * rho / static_cast<double>(count);
    m.coords.resize(static_cast<std::size_t>(count) * n, 0.0);
    m.weights.assign(count, w);
    for (long i = 0; i < count; ++i) {
      const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(count);
      double* p = m.coords.data() + static_cast<std::size_t>(i) * n;
      p[0] = rho * std::cos(a);
      p[1] = rho * std::sin(a);
    }
    m.spacing = w;  // arc step
    m.total_mass = 2.0 * M_PI * rho;
    m.label = "circle rho=" + std::to_string(rho) + " n=" + std::to_string(n);
  } else if (d == 2 && n == 3) {
    // Fibonacci lattice: quasi-uniform, every node carries an equal area cell.
    const double area = 4.0 * M_PI * rho * rho;
    const long count = std::max<long>(32, std::lround(area / (spacing * spacing)));
    const double w = area / static_cast<double>(count);
    m.coords.resize(static_cast<std::size_t>(count) * n, 0.0);
    m.weights.assign(count, w);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (long i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = 2.0 * M_PI * static_cast<double>(i) / golden;
      double* p = m.coords.data() + static_cast<std::size_t>(i) * n;
      p[0] = rho * r * std::cos(a);
      p[1] = rho * r * std::sin(a);
      p[2] = rho * z;
    }
    m.spacing = std::sqrt(w);
    m.total_mass = area;
    m.label = "sphere rho=" + std::to_string(rho);
  } else {
    throw std::invalid_argument("sphere: unsupported (n, d) combination");
  }
  m.extent = rho;
  m.truncated = false;
  m.reg_upper = std::pow(2.0, d) * 2.0;
  return m;
}

PointMeasure rescale_blowup(const PointMeasure& m, std::span<const double> q, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("blowup: radius must be positive");
  if (q.size() != static_cast<std::size_t>(m.ambient_dim))
    throw std::invalid_argument("blowup: center dimension mismatch");

  PointMeasure out;
  out.ambient_dim = m.ambient_dim;
  out.hausdorff_dim = m.hausdorff_dim;
  const int n = m.ambient_dim;
  out.coords.resize(m.coords.size());
  const double inv_r = 1.0 / r;
  for (std::size_t i = 0; i < m.count(); ++i) {
    const double* p = m.coords.data() + i * n;
    double* o = out.coords.data() + i * n;
    for (int a = 0; a < n; ++a) o[a] = (p[a] - q[a]) * inv_r;
  }
  const double wf = std::pow(r, -m.hausdorff_dim);
  out.weights.resize(m.count());
  for (std::size_t i = 0; i < m.count(); ++i) out.weights[i] = m.weights[i] * wf;
  out.spacing = m.spacing * inv_r;
  out.total_mass = m.total_mass * wf;
  out.extent = m.extent * inv_r;
  out.truncated = m.truncated;
  out.reg_upper = m.reg_upper;
  out.label = m.label + " [blowup r=" + std::to_string(r) + "]";
  return out;
}

PointMeasure scale_weights(const PointMeasure& m, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("scale_weights: factor must be positive");
  PointMeasure out = m;
  for (double& w : out.weights) w *= s;
  out.total_mass *= s;
  out.reg_upper *= s;
  out.label = m.label + " [mass x" + std::to_string(s) + "]";
  return out;
}

void save_measure(const PointMeasure& m, std::ostream& out) {
  out << "# n=" << m.ambient_dim << " d=" << fmt_g17(m.hausdorff_dim)
      << " h=" << fmt_g17(m.spacing) << " mass=" << fmt_g17(m.total_mass)
      << " label=" << m.label << "\n";
  const int n = m.ambient_dim;
  for (std::size_t i = 0; i < m.count(); ++i) {
    const double* p = m.coords.data() + i * n;
    for (int a = 0; a < n; ++a) out << fmt_g17(p[a]) << ' ';
    out << fmt_g17(m.weights[i]) << "\n";
  }
}

void save_measure_file(const PointMeasure& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  save_measure(m, f);
}

PointMeasure load_measure(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# ", 0) != 0)
    throw std::runtime_error("measure file: missing header line");

  PointMeasure m;
  auto field = [&header](const std::string& key) -> std::string {
    const auto pos = header.find(" " + key + "=");
    if (pos == std::string::npos) throw std::runtime_error("measure file: missing " + key);
    const auto start = pos + key.size() + 2;
    if (key == "label") return header.substr(start);
    const auto end = header.find(' ', start);
    return header.substr(start, end == std::string::npos ? std::string::npos : end - start);
  };
  m.ambient_dim = std::stoi(field("n"));
  m.hausdorff_dim = std::stod(field("d"));
  m.spacing = std::stod(field("h"));
  m.total_mass = std::stod(field("mass"));
  m.label = field("label");

  const int n = m.ambient_dim;
  if (n < 2 || n > kMaxDim) throw std::runtime_error("measure file: bad dimension");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double v;
    int got = 0;
    double buf[kMaxDim + 1];
    while (row >> v && got <= n) buf[got++] = v;
    if (got != n + 1) throw std::runtime_error("measure file: malformed point row");
    for (int a = 0; a < n; ++a) m.coords.push_back(buf[a]);
    m.weights.push_back(buf[n]);
  }
  if (m.weights.empty()) throw std::runtime_error("measure file: no points");
  // Loaded files carry no window metadata: treat the cloud as the whole set.
  m.extent = bounding_extent(m);
  m.truncated = false;
  m.reg_upper = m.total_mass / std::max(1e-300, std::pow(m.extent, m.hausdorff_dim));
  return m;
}

PointMeasure load_measure_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return load_measure(f);
}

std::vector<double> audit_radii(const PointMeasure& m, double kappa) {
  const double lo = kappa * m.spacing;
  double hi = 0.0;
  // Diameter estimate from the bounding box.
  const int n = m.ambient_dim;
  for (int a = 0; a < n; ++a) {
    double mn = m.coords[a], mx = m.coords[a];
    for (std::size_t i = 0; i < m.count(); ++i) {
      const double v = m.coords[i * n + a];
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    hi += (mx - mn) * (mx - mn);
  }
  hi = std::sqrt(hi) / 4.0;
  std::vector<double> radii;
  for (double r = hi; r >= lo; r *= 0.5) radii.push_back(r);
  std::reverse(radii.begin(), radii.end());
  return radii;
}

RegularityAudit audit_regularity(const PointMeasure& m, const SpatialIndex& index,
                                 std::size_t num_centers, std::span<const double> radii,
                                 Rng rng, double kappa) {
  RegularityAudit a;
  const double lo = kappa * m.spacing;
  for (const double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("audit: radii must be positive");
    a.radii.push_back(r);
  }
  if (a.radii.empty()) throw std::invalid_argument("audit: empty radius window");

  num_centers = std::min<std::size_t>(num_centers, m.count());
  Rng stream = rng.stream("audit-centers");
  for (std::size_t c = 0; c < num_centers; ++c)
    a.center_ids.push_back(stream.uniform_index(m.count()));

  a.ratios.assign(a.center_ids.size() * a.radii.size(),
                  std::numeric_limits<double>::quiet_NaN());
  a.c_low = std::numeric_limits<double>::infinity();
  a.c_high = 0.0;
  for (std::size_t ci = 0; ci < a.center_ids.size(); ++ci) {
    const auto q = m.point(a.center_ids[ci]);
    for (std::size_t ri = 0; ri < a.radii.size(); ++ri) {
      const double r = a.radii[ri];
      if (r < lo) continue;  // below the resolution-validity window
      const double ratio = index.ball_mass(q, r) / std::pow(r, m.hausdorff_dim);
      a.ratios[ci * a.radii.size() + ri] = ratio;
      a.c_low = std::min(a.c_low, ratio);
      a.c_high = std::max(a.c_high, ratio);
      ++a.valid_probes;
    }
  }
  if (a.valid_probes == 0) throw std::invalid_argument("audit: empty valid radius window");
  return a;
}

}  // namespace rdlab
