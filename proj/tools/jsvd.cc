// jsvd: generate inputs, run the batched 2x2 EVD and the Jacobi SVD, and
// measure norm accuracy. Every CSV starts with "# key=value" manifest lines.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "jsvd/efnorm.hpp"
#include "jsvd/evd2.hpp"
#include "jsvd/oracle.hpp"
#include "jsvd/rng.hpp"
#include "jsvd/splitform.hpp"
#include "jsvd/strategy.hpp"
#include "jsvd/svd.hpp"
#include "jsvd/testgen.hpp"

using namespace jsvd;

namespace {

constexpr const char* kFormatVersion = "1";

enum Exit { ok = 0, numerical = 1, usage = 2 };

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class RunManifest {
 public:
  explicit RunManifest(std::string cmd) { set("subcommand", std::move(cmd)); set("format", kFormatVersion); }
  template <class T>
  void set(const std::string& k, const T& v) {
    std::ostringstream os;
    os << v;
    kv_.emplace_back(k, os.str());
  }
  std::string header() const {
    std::string h;
    for (const auto& [k, v] : kv_) h += "# " + k + "=" + v + "\n";
    return h;
  }

 private:
  std::vector<std::pair<std::string, std::string>> kv_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

// Output to a file, or stdout for "" / "-".
class Out {
 public:
  explicit Out(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw usage_error("cannot open for writing: " + path);
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// ---- gen2x2 ----------------------------------------------------------------

struct Gen2x2Args {
  std::size_t r = 1024, s = 8;
  std::uint64_t seed = 1;
  bool real = false;
  std::string out, lambdas;
};

int cmd_gen2x2(const Gen2x2Args& a) {
  Gen2x2 g = gen2x2_batch(a.r, a.seed, !a.real, a.s);
  write_batch(a.out, g.batch);
  write_lambdas(a.lambdas.empty() ? a.out + ".lam" : a.lambdas, g.lam1, g.lam2);
  return ok;
}

// ---- gensvd ----------------------------------------------------------------

struct GenSvdArgs {
  int xi = -23;
  std::size_t n = 128, s = 8;
  std::string perm = "random";
  std::uint64_t seed = 1;
  bool real = false;
  unsigned workers = 1;
  std::string out, sigma;
};

int cmd_gensvd(const GenSvdArgs& a) {
  SpectrumSpec spec{a.xi, a.n, parse_order(a.perm)};
  GenSVD g = gen_svd_matrix(spec, a.seed, !a.real, a.s, a.workers);
  write_split(a.out, g.G);
  RunManifest man("gensvd");
  man.set("seed", a.seed);
  man.set("xi", a.xi);
  man.set("n", a.n);
  man.set("perm", order_name(spec.perm));
  man.set("field", a.real ? "real" : "complex");
  man.set("matrix", a.out);
  write_sigma_csv(a.sigma.empty() ? a.out + ".sigma.csv" : a.sigma, g.sigma, man.header());
  return ok;
}

// ---- evd -------------------------------------------------------------------

struct EvdArgs {
  std::string in, lambdas, out, evd_out;
  std::size_t batch = 1 << 16;
  unsigned workers = 1;
};

HermBatch2 slice(const HermBatch2& b, std::size_t begin, std::size_t end) {
  HermBatch2 o = HermBatch2::make(end - begin, b.complex, b.s);
  std::copy(b.a11.begin() + begin, b.a11.begin() + end, o.a11.begin());
  std::copy(b.a22.begin() + begin, b.a22.begin() + end, o.a22.begin());
  std::copy(b.re_a21.begin() + begin, b.re_a21.begin() + end, o.re_a21.begin());
  if (b.complex) std::copy(b.im_a21.begin() + begin, b.im_a21.begin() + end, o.im_a21.begin());
  return o;
}

int cmd_evd(const EvdArgs& a) {
  const HermBatch2 b = read_batch(a.in);
  try {
    b.require_finite();
  } catch (const std::invalid_argument& e) {
    std::cerr << "jsvd evd: " << a.in << ": " << e.what() << "\n";
    return numerical;
  }
  std::vector<double> lam1, lam2;
  if (!a.lambdas.empty()) read_lambdas(a.lambdas, lam1, lam2);
  if (!lam1.empty() && lam1.size() != b.r) throw usage_error("eigenvalue sidecar size does not match the batch");
  if (a.batch == 0) throw usage_error("--batch must be positive");

  RunManifest man("evd");
  man.set("input", a.in);
  man.set("lambdas", a.lambdas.empty() ? "-" : a.lambdas);
  man.set("r", b.r);
  man.set("field", b.complex ? "complex" : "real");
  man.set("batch", a.batch);
  man.set("workers", a.workers);
  Out out(a.out);
  auto& os = out.os();
  os << man.header()
     << "batch,count,rho_kernel,rho_ref,delta_kernel,delta_ref,lamF_kernel,lamF_ref,lamMax_kernel,"
        "lamMax_ref,t_kernel_s,t_ref_s\n";

  Evd2Options opt;
  opt.want_sines = true;
  opt.workers = a.workers;
  for (std::size_t begin = 0, id = 0; begin < b.r; begin += a.batch, ++id) {
    const std::size_t end = std::min(b.r, begin + a.batch);
    const HermBatch2 part = slice(b, begin, end);
    auto t0 = std::chrono::steady_clock::now();
    const EVDOut2 k = evd2_batch(part, opt);
    const double tk = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const std::vector<RefEVD> ref = ref_evd2_batch(part);
    const double tr = seconds_since(t0);
    std::vector<double> l1, l2;
    if (!lam1.empty()) {
      l1.assign(lam1.begin() + begin, lam1.begin() + end);
      l2.assign(lam2.begin() + begin, lam2.begin() + end);
    }
    const EvdCompare c = ref_evd2_batch_compare(part, k, ref, l1, l2);
    os << id << ',' << c.count << ',' << fmt(c.rho_kernel) << ',' << fmt(c.rho_ref) << ','
       << fmt(c.delta_kernel) << ',' << fmt(c.delta_ref) << ',' << fmt(c.lamF_kernel) << ','
       << fmt(c.lamF_ref) << ',' << fmt(c.lamMax_kernel) << ',' << fmt(c.lamMax_ref) << ',' << fmt(tk)
       << ',' << fmt(tr) << '\n';
  }
  if (!a.evd_out.empty()) write_evd(a.evd_out, evd2_batch(b, Evd2Options{false, false, a.workers, nullptr}));
  return ok;
}

// ---- svd -------------------------------------------------------------------

struct SvdArgs {
  std::string in, strategy = "rr", u, v, sigma, report, reference;
  std::size_t sweeps = 30;
  unsigned workers = 1;
  bool no_gs = false;
};

int cmd_svd(const SvdArgs& a) {
  const SplitMatrix G = read_split(a.in);
  SVDConfig cfg;
  cfg.strategy = parse_strategy(a.strategy);
  cfg.max_sweeps = a.sweeps;
  cfg.workers = a.workers;
  cfg.s = G.s;
  cfg.gram_schmidt = !a.no_gs;

  RunManifest man("svd");
  man.set("input", a.in);
  man.set("m", G.m);
  man.set("n", G.n);
  man.set("field", G.complex ? "complex" : "real");
  man.set("strategy", strategy_name(cfg.strategy));
  man.set("sweeps", cfg.max_sweeps);
  man.set("workers", cfg.workers);
  man.set("gram_schmidt", cfg.gram_schmidt ? 1 : 0);

  SVDResult r;
  try {
    r = svd_run(G, cfg);
  } catch (const numerical_failure& e) {
    std::cerr << "jsvd svd: " << a.in << ": " << e.what() << "\n";
    return numerical;
  }

  if (!a.u.empty()) write_split(a.u, r.U);
  if (!a.v.empty()) write_split(a.v, r.V);
  if (!a.sigma.empty()) {
    Out so(a.sigma);
    so.os() << man.header() << "j,e,f,sigma\n";
    for (std::size_t j = 0; j < r.sigma.size(); ++j)
      so.os() << j << ',' << fmt(r.sigma[j].e) << ',' << fmt(r.sigma[j].f) << ','
              << fmt(r.sigma[j].to_double()) << '\n';
  }

  Out ro(a.report);
  auto& os = ro.os();
  os << man.header() << "kind,key,value\n";
  os << "summary,converged," << (r.converged ? 1 : 0) << '\n';
  os << "summary,C," << r.sweeps << '\n';
  os << "summary,s0," << r.s0 << '\n';
  os << "summary,s_final," << r.s_final << '\n';
  os << "summary,rescalings," << r.rescalings << '\n';
  os << "summary,gs_steps," << r.gs_steps << '\n';
  os << "summary,n_tilde," << r.n_bordered << '\n';
  for (std::size_t k = 0; k < r.sweep_T.size(); ++k) os << "sweep," << k << ',' << r.sweep_T[k] << '\n';
  const PhaseTimes& t = r.times;
  const double tot = t.total() > 0 ? t.total() : 1.0;
  const std::pair<const char*, double> phases[] = {{"rescale", t.rescale}, {"norms", t.norms},
                                                   {"dots", t.dots},       {"gram", t.gram},
                                                   {"evd", t.evd},         {"rotate", t.rotate},
                                                   {"finalize", t.finalize}};
  for (const auto& [name, sec] : phases) {
    os << "time_s," << name << ',' << fmt(sec) << '\n';
    os << "share," << name << ',' << fmt(sec / tot) << '\n';
  }
  if (!a.reference.empty()) {
    const SVDErrors e = error_measures(G, r.U, r.V, r.sigma, read_sigma_csv(a.reference), a.workers);
    os << "error,r_G," << fmt(e.r_G) << '\n'
       << "error,r_U," << fmt(e.r_U) << '\n'
       << "error,r_V," << fmt(e.r_V) << '\n'
       << "error,r_Sigma," << fmt(e.r_Sigma) << '\n';
  }
  if (!r.converged) {
    std::cerr << "jsvd svd: no convergence in " << r.sweeps << " sweeps\n";
    return numerical;
  }
  return ok;
}

// ---- norm ------------------------------------------------------------------

struct NormArgs {
  std::size_t m = std::size_t(1) << 20;
  std::size_t vectors = 65;
  std::vector<int> xi{0, 1008};
  std::uint64_t seed = 1;
  std::string out;
};

// Random finite bit patterns with |x| <= 2^xi.
void fill_random(AlignedVec& x, int xi, SplitMix64& g) {
  const double cap = std::ldexp(1.0, xi);
  for (double& v : x) {
    do v = fp::from_bits(g());
    while (!(std::fabs(v) <= cap));
  }
}

// Scaled sum of squares, the xNRM2 reference scheme.
double scaled_nrm2(const double* x, std::size_t n) {
  double scale = 0.0, ssq = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0.0) continue;
    const double a = std::fabs(x[i]);
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double naive_norm(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

int cmd_norm(const NormArgs& a) {
  if (a.m == 0 || a.m % 8 != 0) throw usage_error("--m must be a positive multiple of 8");
  RunManifest man("norm");
  man.set("m", a.m);
  man.set("vectors", a.vectors);
  std::string xs;
  for (int x : a.xi) xs += (xs.empty() ? "" : ";") + std::to_string(x);
  man.set("xi", xs);
  man.set("seed", a.seed);
  Out out(a.out);
  auto& os = out.os();
  os << man.header() << "procedure,xi,vector,rel_error,overflow,time_s\n";

  using Fn = EFNumber (*)(const double*, std::size_t);
  const std::pair<const char*, Fn> procs[] = {
      {"ef_sequential",
       [](const double* x, std::size_t n) { return kern::frob_norm_ef<lanes::Native>(x, n); }},
      {"ef_pairwise",
       [](const double* x, std::size_t n) {
         return kern::frob_norm_ef<lanes::Native>(x, n, kern::Reduction::pairwise);
       }},
      {"scaled_nrm2",
       [](const double* x, std::size_t n) { return EFNumber::from_double(scaled_nrm2(x, n)); }},
      {"naive_dot", [](const double* x, std::size_t n) { return EFNumber::from_double(naive_norm(x, n)); }},
  };

  AlignedVec x(a.m);
  for (int xi : a.xi) {
    if (xi < -1074 || xi > 1023) throw usage_error("--xi out of range");
    SplitMix64 g(a.seed, static_cast<std::uint64_t>(xi + 4096));
    for (std::size_t v = 0; v < a.vectors; ++v) {
      if (v == 0)
        std::fill(x.begin(), x.end(), 0.0);
      else
        fill_random(x, xi, g);
      const QuadNorm ref = quad_norm(x.data(), x.size());
      for (const auto& [name, fn] : procs) {
        const auto t0 = std::chrono::steady_clock::now();
        const EFNumber r = fn(x.data(), x.size());
        const double t = seconds_since(t0);
        const bool overflow = !r.finite();
        os << name << ',' << xi << ',' << v << ',' << fmt(overflow ? FloatEnv::inf : rel_error(r, ref)) << ','
           << (overflow ? 1 : 0) << ',' << fmt(t) << '\n';
      }
    }
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batched 2x2 Hermitian EVD and one-sided Jacobi SVD"};
  app.require_subcommand(1);

  Gen2x2Args g2;
  auto* c_g2 = app.add_subcommand("gen2x2", "Generate a batch of 2x2 matrices with prescribed eigenvalues");
  c_g2->add_option("--r", g2.r, "Number of matrices")->check(CLI::PositiveNumber);
  c_g2->add_option("--seed", g2.seed, "PRNG seed");
  c_g2->add_flag("--real", g2.real, "Real symmetric instead of complex Hermitian");
  c_g2->add_option("--lanes", g2.s, "Lane count used for padding")->check(CLI::IsMember({2, 4, 8, 16}));
  c_g2->add_option("-o,--out", g2.out, "Batch file")->required();
  c_g2->add_option("--lambdas", g2.lambdas, "Eigenvalue sidecar (default: OUT.lam)");

  GenSvdArgs gs;
  auto* c_gs = app.add_subcommand("gensvd", "Generate a square matrix with prescribed singular values");
  c_gs->add_option("--xi", gs.xi, "sigma_i = 2^(xi (1 - (i-1)/(n-1)))");
  c_gs->add_option("--n", gs.n, "Order")->check(CLI::Range(std::size_t(2), std::size_t(1) << 20));
  c_gs->add_option("--perm", gs.perm, "ascending, descending or random");
  c_gs->add_option("--seed", gs.seed, "PRNG seed");
  c_gs->add_flag("--real", gs.real, "Real instead of complex");
  c_gs->add_option("--lanes", gs.s, "Lane count used for padding")->check(CLI::IsMember({2, 4, 8, 16}));
  c_gs->add_option("--workers", gs.workers, "Worker threads");
  c_gs->add_option("-o,--out", gs.out, "Matrix file")->required();
  c_gs->add_option("--sigma", gs.sigma, "Singular value sidecar (default: OUT.sigma.csv)");

  EvdArgs ev;
  auto* c_ev = app.add_subcommand("evd", "Run the batched EVD and compare with the reference routine");
  c_ev->add_option("-i,--in", ev.in, "Batch file")->required();
  c_ev->add_option("--lambdas", ev.lambdas, "Eigenvalue sidecar for the eigenvalue residuals");
  c_ev->add_option("--batch", ev.batch, "Matrices per CSV row");
  c_ev->add_option("--workers", ev.workers, "Worker threads");
  c_ev->add_option("-o,--out", ev.out, "CSV output (default: stdout)");
  c_ev->add_option("--evd-out", ev.evd_out, "Write the kernel's output in binary form");

  SvdArgs sv;
  auto* c_sv = app.add_subcommand("svd", "One-sided Jacobi SVD of a split-form matrix");
  c_sv->add_option("-i,--in", sv.in, "Matrix file")->required();
  c_sv->add_option("--strategy", sv.strategy, "rr or me");
  c_sv->add_option("--sweeps", sv.sweeps, "Maximal number of sweeps");
  c_sv->add_option("--workers", sv.workers, "Worker threads");
  c_sv->add_flag("--no-gs", sv.no_gs, "Disable the Gram-Schmidt shortcut for real inputs");
  c_sv->add_option("--u", sv.u, "Left singular vectors (split-form file)");
  c_sv->add_option("--v", sv.v, "Right singular vectors (split-form file)");
  c_sv->add_option("--sigma", sv.sigma, "Singular values CSV");
  c_sv->add_option("--report", sv.report, "Report CSV (default: stdout)");
  c_sv->add_option("--reference", sv.reference, "Reference sigma CSV; adds error measures to the report");

  NormArgs nm;
  auto* c_nm = app.add_subcommand("norm", "Frobenius norm accuracy on random vectors");
  c_nm->add_option("--m", nm.m, "Vector length");
  c_nm->add_option("--vectors", nm.vectors, "Vectors per exponent range, the first one zero");
  c_nm->add_option("--xi", nm.xi, "Exponent bounds |x| <= 2^xi")->delimiter(',');
  c_nm->add_option("--seed", nm.seed, "PRNG seed");
  c_nm->add_option("-o,--out", nm.out, "CSV output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }

  try {
    if (*c_g2) return cmd_gen2x2(g2);
    if (*c_gs) return cmd_gensvd(gs);
    if (*c_ev) return cmd_evd(ev);
    if (*c_sv) return cmd_svd(sv);
    if (*c_nm) return cmd_norm(nm);
  } catch (const numerical_failure& e) {
    std::cerr << "jsvd: " << e.what() << "\n";
    return numerical;
  } catch (const std::exception& e) {
    std::cerr << "jsvd: " << e.what() << "\n";
    return usage;
  }
  return usage;
}
