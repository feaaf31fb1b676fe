// nedelec: verification suites, interpolation studies, cavity spectra and
// mesh generation from the command line.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nedelec/mesh.hpp"
#include "nedelec/spectrum.hpp"
#include "nedelec/verify.hpp"

using namespace nedelec;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string subcommand;
  std::string p_range = "1";
  std::string mesh = "reference_tet";
  int n = 1;
  std::string scale = "1";
  std::string bc = "none";
  std::string ip = "l2";
  std::string eps = "auto";
  std::string field = "rotating_sine";
  std::string epsilon_tensor, mu_tensor;
  std::optional<int> window_p;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 1;
  int trials = 4;
  int jobs = 1;
  int modes = 6;
  bool quiet = false;
  std::string fault;

  json echo() const {
    json j{{"subcommand", subcommand}, {"format", format}};
    if (subcommand != "mesh") j["p"] = p_range;
    if (subcommand != "verify") j.update({{"mesh", mesh}, {"n", n}, {"scale", scale}});
    if (subcommand == "verify" || subcommand == "interp") j.update({{"ip", ip}, {"eps", eps}});
    if (subcommand == "verify") j.update({{"trials", trials}, {"seed", seed}});
    if (subcommand == "interp") j["field"] = field;
    if (subcommand == "eig") {
      j["bc"] = bc;
      j["epsilon"] = epsilon_tensor.empty() ? "identity" : epsilon_tensor;
      j["mu"] = mu_tensor.empty() ? "identity" : mu_tensor;
      j["modes"] = modes;
      if (window_p) j["window_p"] = *window_p;
    }
    if (!fault.empty()) j["fault_inject"] = fault;
    return j;
  }
};

std::vector<int> parse_p_range(const std::string& s) {
  std::vector<int> out;
  auto parse_int = [&](const std::string& t) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(t, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != t.size() || t.empty() || v < 0) throw std::invalid_argument("--p: '" + t + "' is not a degree >= 0");
    return v;
  };
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(part));
      continue;
    }
    const int a = parse_int(part.substr(0, dots)), b = parse_int(part.substr(dots + 2));
    if (b < a) throw std::invalid_argument("--p: empty range '" + part + "'");
    for (int p = a; p <= b; ++p) out.push_back(p);
  }
  if (out.empty()) throw std::invalid_argument("--p: no degrees given");
  return out;
}

double parse_scale(const std::string& s) {
  if (s == "pi") return std::numbers::pi;
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || !(v > 0)) throw std::invalid_argument("--scale: expected a positive number or 'pi', got '" + s + "'");
  return v;
}

BoundaryCondition parse_bc(const std::string& s) {
  return s == "dirichlet" ? BoundaryCondition::Dirichlet : BoundaryCondition::None;
}

InterpOptions parse_interp(const RunConfig& c) {
  InterpOptions o;
  if (c.ip == "frac") {
    if (c.eps == "auto") {
      o.ip = InnerProductSpec::fractional_scheduled();
    } else {
      double e = 0;
      try {
        e = std::stod(c.eps);
      } catch (const std::exception&) {
        throw std::invalid_argument("--eps: expected a number in (0, 1/2) or 'auto'");
      }
      o.ip = InnerProductSpec::fractional(e);
    }
  }
  if (c.fault == "lifting-sign") o.fault_lifting_sign = true;
  return o;
}

Mesh load_mesh(const RunConfig& c) {
  const double s = parse_scale(c.scale);
  if (c.mesh == "reference_tet") return Mesh(reference_tet_mesh().vertices(), {{0, 1, 2, 3}}, {}, s);
  if (c.mesh == "cube6") return cube6(s);
  if (c.mesh == "cube_grid") return cube_grid(c.n, s);
  return read_mesh_file(c.mesh, s);
}

Matrix parse_tensor(const std::string& s, const char* flag) {
  std::vector<Rational> v;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) v.push_back(parse_rational(part));
  Matrix m(3, 3);
  if (v.size() == 3) {
    for (int i = 0; i < 3; ++i) m(i, i) = v[i];
  } else if (v.size() == 9) {
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = v[i];
  } else {
    throw std::invalid_argument(std::string(flag) + ": expected 3 diagonal or 9 row-major entries");
  }
  return m;
}

MaterialSpec parse_material(const RunConfig& c) {
  MaterialSpec mat;
  if (!c.epsilon_tensor.empty()) mat.set_default_epsilon(parse_tensor(c.epsilon_tensor, "--epsilon"));
  if (!c.mu_tensor.empty()) mat.set_default_mu(parse_tensor(c.mu_tensor, "--mu"));
  return mat;
}

/// Runs f(p) for every p with up to `jobs` concurrent tasks; results keep p order.
template <class F>
auto run_jobs(const std::vector<int>& ps, int jobs, F f) {
  using R = decltype(f(0));
  std::vector<R> out;
  out.reserve(ps.size());
  for (std::size_t begin = 0; begin < ps.size(); begin += std::size_t(std::max(jobs, 1))) {
    std::vector<std::future<R>> batch;
    const std::size_t end = std::min(ps.size(), begin + std::size_t(std::max(jobs, 1)));
    for (std::size_t i = begin; i < end; ++i)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, f, ps[i]));
    for (auto& b : batch) out.push_back(b.get());
  }
  return out;
}

/// Config echo as "# key=value" comment lines (mesh and csv artifacts).
void write_echo(std::ostream& out, const json& echo) {
  for (const auto& [k, v] : echo.items()) out << "# " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
}

class Output {
 public:
  explicit Output(const RunConfig& c) : cfg_(c) {
    if (!c.out.empty()) {
      file_.open(c.out);
      if (!file_) throw std::runtime_error("cannot open output file '" + c.out + "'");
    }
  }
  std::ostream& artifact() { return cfg_.out.empty() ? std::cout : file_; }
  std::ostream& log() { return cfg_.out.empty() ? std::cerr : std::cout; }
  bool quiet() const { return cfg_.quiet; }
  void csv_echo() { write_echo(artifact(), cfg_.echo()); }

 private:
  const RunConfig& cfg_;
  std::ofstream file_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

int cmd_verify(const RunConfig& c) {
  const auto ps = parse_p_range(c.p_range);
  VerifyOptions opt;
  opt.trials = c.trials;
  opt.seed = c.seed;
  opt.interp = parse_interp(c);
  const auto results = run_jobs(ps, c.jobs, [&](int p) { return verify_suite(p, opt); });
  Output out(c);
  bool ok = true;
  std::vector<std::string> failed;
  for (const auto& rs : results)
    for (const auto& r : rs) {
      if (!r.passed) ok = false, failed.push_back(r.id + "@p=" + std::to_string(r.p));
      if (!out.quiet())
        out.log() << "p=" << r.p << " " << r.id << " " << (r.passed ? "PASS" : "FAIL") << "  " << r.detail << "\n";
    }
  if (c.format == "csv") {
    out.csv_echo();
    out.artifact() << "p,check,passed,detail\n";
    for (const auto& rs : results)
      for (const auto& r : rs) out.artifact() << r.p << "," << r.id << "," << (r.passed ? 1 : 0) << "," << csv_field(r.detail) << "\n";
  } else {
    json j{{"config", c.echo()}, {"passed", ok}, {"failed", failed}};
    j["results"] = json::array();
    for (const auto& rs : results)
      for (const auto& r : rs) j["results"].push_back(r);
    out.artifact() << j.dump(2) << "\n";
  }
  if (!ok) {
    std::cerr << "verify: failed checks:";
    for (const auto& f : failed) std::cerr << " " << f;
    std::cerr << "\n";
  }
  return ok ? 0 : 1;
}

VectorField pick_field(const std::string& name) {
  if (name == "grad_sine") return grad_sine_field();
  if (name == "solenoidal_sine") return solenoidal_sine_field();
  return rotating_sine_field();
}

int cmd_interp(const RunConfig& c) {
  const auto ps = parse_p_range(c.p_range);
  const Mesh m = load_mesh(c);
  if (m.scale() != 1.0) throw std::invalid_argument("interp: --scale is not supported, use mesh coordinates");
  const InterpOptions opt = parse_interp(c);
  const VectorField field = pick_field(c.field);
  const auto rows = run_jobs(ps, c.jobs, [&](int p) {
    const std::vector<int> one{p};
    return interp_error_study(m, field, one, opt).front();
  });
  std::vector<double> l2;
  for (const auto& r : rows) l2.push_back(r.l2);
  std::optional<double> slope;
  if (ps.size() >= 2 && std::all_of(ps.begin(), ps.end(), [](int p) { return p > 0; })) slope = loglog_slope(ps, l2);
  Output out(c);
  if (!out.quiet())
    for (const auto& r : rows) out.log() << "p=" << r.p << " dofs=" << r.dofs << " L2=" << r.l2 << " Hcurl=" << r.hcurl << "\n";
  if (c.format == "csv") {
    out.csv_echo();
    out.artifact() << "p,dofs,L2_error,Hcurl_error,consistent\n";
    out.artifact().precision(12);
    for (const auto& r : rows) out.artifact() << r.p << "," << r.dofs << "," << r.l2 << "," << r.hcurl << "," << r.consistent << "\n";
  } else {
    json j{{"config", c.echo()}};
    j["rows"] = json::array();
    for (const auto& r : rows)
      j["rows"].push_back({{"p", r.p}, {"dofs", r.dofs}, {"L2_error", r.l2}, {"Hcurl_error", r.hcurl}, {"consistent", r.consistent}});
    if (slope) j["loglog_slope"] = *slope;
    out.artifact() << j.dump(2) << "\n";
  }
  return 0;
}

bool is_cube_mesh(const std::string& name) { return name == "cube6" || name == "cube_grid"; }

int cmd_eig(const RunConfig& c) {
  const auto ps = parse_p_range(c.p_range);
  const Mesh m = load_mesh(c);
  const MaterialSpec mat = parse_material(c);
  const BoundaryCondition bc = parse_bc(c.bc);
  SpectrumOptions opt;
  opt.defect_modes = c.modes;
  if (is_cube_mesh(c.mesh) && bc == BoundaryCondition::Dirichlet && mat.is_identity())
    opt.analytic = pec_cube_spectrum(200, m.scale());
  if (c.window_p) {
    SpectrumOptions ref_opt;
    ref_opt.compute_defect = false;
    const auto ref = maxwell_spectrum(m, *c.window_p, mat, bc, ref_opt).first_physical();
    if (!ref) throw std::runtime_error("eig: reference run has no nonzero eigenvalue");
    opt.window_reference = *ref;
  }
  const auto reps = run_jobs(ps, c.jobs, [&](int p) { return maxwell_spectrum(m, p, mat, bc, opt); });
  Output out(c);
  if (!out.quiet())
    for (const auto& r : reps) {
      out.log() << "p=" << r.p << " dofs=" << r.dofs << " kernel=" << r.kernel_count << "/" << r.expected_kernel
                << " spurious=" << r.spurious_count;
      if (r.nonzero_count() > 0) out.log() << " lowest=" << r.eigenvalues[r.kernel_count];
      out.log() << "\n";
    }
  if (c.format == "csv") {
    out.csv_echo();
    out.artifact() << SpectrumReport::csv_header() << "\n";
    for (const auto& r : reps) r.write_csv_rows(out.artifact());
  } else {
    json j{{"config", c.echo()}};
    j["runs"] = json::array();
    for (const auto& r : reps) j["runs"].push_back(r.to_json());
    out.artifact() << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_mesh(const RunConfig& c) {
  if (c.out.empty()) throw std::invalid_argument("mesh: --out is required");
  const Mesh m = load_mesh(c);
  {
    std::ofstream f(c.out);
    if (!f) throw std::runtime_error("cannot open output file '" + c.out + "'");
    write_echo(f, c.echo());
    write_mesh(f, m, true);
  }
  if (c.quiet) return 0;
  if (c.format == "csv") {
    std::cout << "vertices,edges,faces,tets\n"
              << m.num_vertices() << "," << m.num_edges() << "," << m.num_faces() << "," << m.num_tets() << "\n";
  } else {
    json j{{"config", c.echo()},       {"path", c.out},          {"vertices", m.num_vertices()},
           {"edges", m.num_edges()}, {"faces", m.num_faces()}, {"tets", m.num_tets()}};
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-version Nedelec edge elements on tetrahedra"};
  app.require_subcommand(1);
  RunConfig cfg;

  const std::vector<std::string> formats{"json", "csv"};
  auto common = [&](CLI::App* s, bool with_p) {
    if (with_p) s->add_option("--p", cfg.p_range, "degree, list or range such as 0..3")->capture_default_str();
    s->add_option("--out", cfg.out, "output path (default: stdout)");
    s->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember(formats))->capture_default_str();
    s->add_option("--seed", cfg.seed, "seed for randomized inputs")->capture_default_str();
    s->add_flag("--quiet", cfg.quiet, "suppress progress lines");
  };
  auto mesh_opts = [&](CLI::App* s, const char* flag) {
    s->add_option(flag, cfg.mesh, "reference_tet, cube6, cube_grid or a mesh file")->capture_default_str();
    s->add_option("--n", cfg.n, "cube_grid subdivisions")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--scale", cfg.scale, "length scale, a number or 'pi'")->capture_default_str();
  };
  auto ip_opts = [&](CLI::App* s) {
    s->add_option("--ip", cfg.ip, "edge inner product: l2 or frac")
        ->check(CLI::IsMember({"l2", "frac"}))
        ->capture_default_str();
    s->add_option("--eps", cfg.eps, "fractional exponent in (0, 1/2) or 'auto'")->capture_default_str();
  };

  auto* verify = app.add_subcommand("verify", "local space, sequence and interpolation checks");
  common(verify, true);
  ip_opts(verify);
  verify->add_option("--trials", cfg.trials, "random inputs per element and check")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--fault-inject", cfg.fault)->check(CLI::IsMember({"lifting-sign"}))->group("");

  auto* interp = app.add_subcommand("interp", "interpolation error study for an analytic field");
  common(interp, true);
  mesh_opts(interp, "--mesh");
  ip_opts(interp);
  interp->add_option("--field", cfg.field, "grad_sine, rotating_sine or solenoidal_sine")
      ->check(CLI::IsMember({"grad_sine", "rotating_sine", "solenoidal_sine"}))
      ->capture_default_str();

  auto* eig = app.add_subcommand("eig", "curl-curl eigenvalues");
  common(eig, true);
  mesh_opts(eig, "--mesh");
  eig->add_option("--bc", cfg.bc, "none or dirichlet")->check(CLI::IsMember({"none", "dirichlet"}))->capture_default_str();
  eig->add_option("--epsilon", cfg.epsilon_tensor, "permittivity: 3 diagonal or 9 entries, e.g. 1,2,4");
  eig->add_option("--mu", cfg.mu_tensor, "permeability: 3 diagonal or 9 entries");
  eig->add_option("--window-p", cfg.window_p, "degree of a reference run that sets the spurious window");
  eig->add_option("--modes", cfg.modes, "modes checked for the divergence defect")->capture_default_str();

  auto* mesh = app.add_subcommand("mesh", "generate or convert a mesh");
  common(mesh, false);
  mesh_opts(mesh, "--gen");

  for (auto* s : {verify, interp, eig})
    s->add_option("--jobs", cfg.jobs, "concurrent (mesh, p) jobs")->check(CLI::PositiveNumber)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (verify->parsed()) {
      cfg.subcommand = "verify";
      cfg.mesh = "reference_tet";
      return cmd_verify(cfg);
    }
    if (interp->parsed()) return cfg.subcommand = "interp", cmd_interp(cfg);
    if (eig->parsed()) return cfg.subcommand = "eig", cmd_eig(cfg);
    if (mesh->parsed()) return cfg.subcommand = "mesh", cmd_mesh(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
