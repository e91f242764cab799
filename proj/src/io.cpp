#include "pluri/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

namespace pluri::io {
namespace {

static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");

enum class Kind : std::uint32_t { primal = 1, dual = 2, curve = 3 };

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void f64s(const std::vector<double>& v) {
    u32(std::uint32_t(v.size()));
    raw(v.data(), v.size() * sizeof(double));
  }
  void str(const std::string& s) {
    u32(std::uint32_t(s.size()));
    raw(s.data(), s.size());
  }
  void header(Kind kind, int dim) {
    raw("PLGR", 4);
    u32(kFormatVersion);
    u32(std::uint32_t(kind));
    u32(std::uint32_t(dim));
  }
  void finish(const std::filesystem::path& path) {
    out_.flush();
    if (!out_) throw IoError("write failed: " + path.string());
  }

 private:
  void raw(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), std::streamsize(n)); }
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path.string()) {
    if (!in_) throw IoError("cannot open " + path_);
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    raw(&v, sizeof v);
    return v;
  }
  std::vector<double> f64s() {
    std::vector<double> v(u32());
    raw(v.data(), v.size() * sizeof(double));
    return v;
  }
  std::string str() {
    std::string s(u32(), '\0');
    raw(s.data(), s.size());
    return s;
  }
  int header(Kind expected) {
    char magic[4];
    raw(magic, 4);
    if (std::memcmp(magic, "PLGR", 4) != 0) fail("bad magic");
    if (u32() != kFormatVersion) fail("unsupported format version");
    if (u32() != std::uint32_t(expected)) fail("unexpected record kind");
    return int(u32());
  }
  [[noreturn]] void fail(const std::string& why) const { throw IoError(path_ + ": " + why); }

 private:
  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), std::streamsize(n));
    if (!in_) fail("truncated file");
  }
  std::ifstream in_;
  std::string path_;
};

void put_primal(Writer& w, const PrimalPotential& u) {
  w.f64(u.grid.half_width());
  w.u32(std::uint32_t(u.grid.points()));
  w.u32(std::uint32_t(u.window.dim));
  w.f64(u.window.lo);
  w.f64(u.window.hi);
  w.u32(std::uint32_t(u.window.polygon.size()));
  for (Vec2 v : u.window.polygon) {
    w.f64(v.x);
    w.f64(v.y);
  }
  w.u32(u.convex ? 1 : 0);
  w.f64s(u.values);
}

PrimalPotential get_primal(Reader& r, int dim) {
  const double half = r.f64();
  const int points = int(r.u32());
  SlopeWindow win;
  win.dim = int(r.u32());
  win.lo = r.f64();
  win.hi = r.f64();
  win.polygon.resize(r.u32());
  for (Vec2& v : win.polygon) {
    v.x = r.f64();
    v.y = r.f64();
  }
  const bool convex = r.u32() != 0;
  PrimalGrid grid(dim, half, points);
  std::vector<double> values = r.f64s();
  if (values.size() != grid.size()) r.fail("value count does not match the grid");
  return {grid, std::move(values), std::move(win), convex};
}

void check_body(Reader& r, const std::string& stored, const SlopeBody& body) {
  if (stored != body.id()) r.fail("body mismatch: file has " + stored + ", expected " + body.id());
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void close_csv(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

void write_primal(const std::filesystem::path& path, const PrimalPotential& u) {
  Writer w(path);
  w.header(Kind::primal, u.grid.dim());
  put_primal(w, u);
  w.finish(path);
}

PrimalPotential read_primal(const std::filesystem::path& path, const SlopeBody& body) {
  Reader r(path);
  const int dim = r.header(Kind::primal);
  if (dim != body.dim()) r.fail("dimension mismatch");
  return get_primal(r, dim);
}

void write_dual(const std::filesystem::path& path, const DualPotential& d) {
  Writer w(path);
  w.header(Kind::dual, d.grid.dim());
  w.str(d.grid.body().id());
  for (int k = 0; k < 2; ++k) {
    w.f64(d.grid.axis(k).origin);
    w.f64(d.grid.axis(k).step);
    w.u32(std::uint32_t(d.grid.axis(k).count));
  }
  w.f64s(d.values);
  w.finish(path);
}

DualPotential read_dual(const std::filesystem::path& path, const SlopeBody& body) {
  Reader r(path);
  const int dim = r.header(Kind::dual);
  if (dim != body.dim()) r.fail("dimension mismatch");
  check_body(r, r.str(), body);
  Axis ax[2];
  for (Axis& a : ax) {
    a.origin = r.f64();
    a.step = r.f64();
    a.count = int(r.u32());
  }
  DualGrid grid(body, ax[0], ax[1]);
  std::vector<double> values = r.f64s();
  if (values.size() != grid.size()) r.fail("value count does not match the grid");
  return {std::move(grid), std::move(values), {}};
}

void write_curve(const std::filesystem::path& path, const PotentialCurve& curve) {
  if (curve.frames.empty()) throw IoError("cannot write an empty curve");
  Writer w(path);
  w.header(Kind::curve, curve.frames.front().dim());
  w.str(to_string(curve.kind));
  w.f64(curve.lipschitz);
  w.f64s(curve.times);
  for (const Potential& f : curve.frames) put_primal(w, f.primal());
  w.finish(path);
}

PotentialCurve read_curve(const std::filesystem::path& path, const DualGrid& dual) {
  Reader r(path);
  const int dim = r.header(Kind::curve);
  if (dim != dual.dim()) r.fail("dimension mismatch");
  PotentialCurve c;
  const std::string kind = r.str();
  if (kind == "geodesic") c.kind = CurveKind::geodesic;
  else if (kind == "ray") c.kind = CurveKind::ray;
  else if (kind == "subgeodesic") c.kind = CurveKind::subgeodesic;
  else r.fail("unknown curve kind " + kind);
  c.lipschitz = r.f64();
  c.times = r.f64s();
  for (std::size_t k = 0; k < c.times.size(); ++k) c.frames.push_back(Potential::from_primal(get_primal(r, dim), dual, "frame"));
  return c;
}

void write_curve_csv(const std::filesystem::path& path, const BigClass& cls, const PotentialCurve& curve) {
  const EnergyAlongReport e = energy_along(cls, curve);
  auto out = open_csv(path);
  out << "t,energy,sup_to_V\n";
  for (std::size_t k = 0; k < curve.size(); ++k) {
    out << format_double(curve.times[k]) << ',' << format_double(e.values[k]) << ','
        << format_double(sup_distance(curve.frames[k].primal(), cls.envelope().primal())) << '\n';
  }
  close_csv(out, path);
}

void write_sweep_csv(const std::filesystem::path& path, const RwnSweepResult& sweep, double tol) {
  auto out = open_csv(path);
  out << "C,sup_distance,stabilized\n";
  for (std::size_t k = 0; k < sweep.sweep.size(); ++k) {
    const bool settled = k >= 1 && sweep.sweep[k - 1].sup_distance <= tol && sweep.sweep[k].sup_distance <= tol;
    out << format_double(sweep.sweep[k].shift) << ',' << format_double(sweep.sweep[k].sup_distance) << ','
        << (settled ? 1 : 0) << '\n';
  }
  close_csv(out, path);
}

void write_beta_csv(const std::filesystem::path& path, const BetaSweepReport& report) {
  auto out = open_csv(path);
  out << "beta,dist_to_envelope,monotone_ok,sign_ok,barrier_slack\n";
  for (const BetaRow& r : report.rows) {
    out << format_double(r.beta) << ',' << format_double(r.dist_to_envelope) << ',' << (r.monotone_ok ? 1 : 0) << ','
        << (r.sign_ok ? 1 : 0) << ',' << format_double(r.barrier_slack) << '\n';
  }
  close_csv(out, path);
}

void write_comparison_csv(const std::filesystem::path& path, const ComparisonTable& table) {
  auto out = open_csv(path);
  out << "E_id,cap_P1,cap_P2,T_P1,prop25_bound,prop25_ok,thm26_C\n";
  for (const ComparisonRow& r : table.rows) {
    out << r.id << ',' << format_double(r.cap1) << ',' << format_double(r.cap2) << ',' << format_double(r.t1) << ','
        << format_double(r.prop25_bound) << ',' << (r.prop25_ok ? 1 : 0) << ',' << format_double(r.thm26_c) << '\n';
  }
  close_csv(out, path);
}

void write_measure_csv(const std::filesystem::path& path, const Potential& u) {
  const MaMeasure m = ma_measure(u);
  auto out = open_csv(path);
  const bool two = u.dim() == 2;
  out << (two ? "x,y,mass\n" : "x,mass\n");
  for (std::size_t i = 0; i < m.masses.size(); ++i) {
    const Vec2 x = u.primal_grid().point(i);
    out << format_double(x.x) << ',';
    if (two) out << format_double(x.y) << ',';
    out << format_double(m.masses[i]) << '\n';
  }
  close_csv(out, path);
}

}  // namespace pluri::io
