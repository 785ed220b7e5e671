#include "jsvd/testgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "jsvd/binio.hpp"
#include "jsvd/parallel.hpp"
#include "jsvd/rng.hpp"

namespace jsvd {

SpectrumOrder parse_order(const std::string& name) {
  if (name == "ascending" || name == "asc") return SpectrumOrder::ascending;
  if (name == "descending" || name == "desc") return SpectrumOrder::descending;
  if (name == "random") return SpectrumOrder::random;
  throw std::invalid_argument("unknown order '" + name + "' (ascending|descending|random)");
}

const char* order_name(SpectrumOrder o) {
  switch (o) {
    case SpectrumOrder::ascending: return "ascending";
    case SpectrumOrder::descending: return "descending";
    default: return "random";
  }
}

std::vector<double> spectrum(const SpectrumSpec& spec, std::uint64_t seed) {
  const std::size_t n = spec.n;
  if (n < 2) throw std::invalid_argument("spectrum: n must be at least 2");
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = static_cast<double>(spec.xi) * static_cast<double>(n - 1 - i) /
                     static_cast<double>(n - 1);
    s[i] = std::exp2(y);
  }
  if (spec.perm == SpectrumOrder::descending) std::reverse(s.begin(), s.end());
  if (spec.perm == SpectrumOrder::random) {
    SplitMix64 g(seed, 0xfeedull);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(s[i], s[g.below(i + 1)]);
  }
  return s;
}

Elements2 assemble2x2(double l1, double l2, const DD& t_signed, double ca, bool complex) {
  const double sgn = std::signbit(t_signed.hi) ? -1.0 : 1.0;
  const DD t = abs(t_signed);
  const DD den = DD(1.0) + sq(t);
  const DD c2 = DD(1.0) / den;
  const DD s2 = sq(t) / den;
  const DD sc = t / den;
  const DD d = dd::two_sum(l1, -l2);
  Elements2 e;
  e.a11 = (c2 * DD(l1) + s2 * DD(l2)).to_double();
  e.a22 = (s2 * DD(l1) + c2 * DD(l2)).to_double();
  const DD off = sc * d;
  if (complex) {
    const DD sa = sqrt(DD(1.0) - dd::two_prod(ca, ca));
    e.re = sgn * (off * DD(ca)).to_double();
    e.im = sgn * (off * sa).to_double();
  } else {
    e.re = sgn * off.to_double();
  }
  return e;
}

namespace {

// int64 * 2^-63 carried exactly in double-double.
DD signed_unit(std::uint64_t bits) {
  const auto x = static_cast<std::int64_t>(bits);
  const double hi = static_cast<double>(x);
  const double lo = static_cast<double>(static_cast<__int128>(x) - static_cast<__int128>(hi));
  return {std::ldexp(hi, -63), std::ldexp(lo, -63)};
}

}  // namespace

Gen2x2 gen2x2_batch(std::size_t r, std::uint64_t seed, bool complex, std::size_t s) {
  Gen2x2 g;
  g.batch = HermBatch2::make(r, complex, s);
  g.lam1.resize(r);
  g.lam2.resize(r);
  const double cap = FloatEnv::omega / 16;
  for (std::size_t j = 0; j < r; ++j) {
    SplitMix64 rng(seed, j);
    double l1, l2;
    for (;;) {
      l1 = fp::from_bits(rng());
      l2 = fp::from_bits(rng());
      if (std::isfinite(l1) && std::isfinite(l2) && std::fabs(l1) <= cap && std::fabs(l2) <= cap &&
          std::fabs(l1) + std::fabs(l2) <= cap)
        break;
    }
    const DD t = signed_unit(rng());
    const double ca = signed_unit(rng()).to_double();
    const Elements2 e = assemble2x2(l1, l2, t, complex ? ca : 1.0, complex);
    g.batch.a11[j] = e.a11;
    g.batch.a22[j] = e.a22;
    g.batch.re_a21[j] = e.re;
    if (complex) g.batch.im_a21[j] = e.im;
    g.lam1[j] = l1;
    g.lam2[j] = l2;
  }
  return g;
}

namespace {

// Column-major n x n double-double matrix.
struct DDMatrix {
  std::size_t n;
  bool complex;
  std::vector<DD> re, im;
  DDMatrix(std::size_t n_, bool c) : n(n_), complex(c), re(n_ * n_), im(c ? n_ * n_ : 0) {}
  DD& r(std::size_t i, std::size_t j) { return re[j * n + i]; }
  DD& i_(std::size_t i, std::size_t j) { return im[j * n + i]; }

  void conj_transpose() {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = j + 1; i < n; ++i) {
        std::swap(r(i, j), r(j, i));
        if (complex) std::swap(i_(i, j), i_(j, i));
      }
    for (DD& x : im) x = -x;
  }
};

// M <- D H_0 H_1 ... H_{n-2} M: random reflectors from Gaussian vectors,
// then a random sign (real) or phase (complex) per row.
void random_unitary_left(DDMatrix& M, SplitMix64& rng, Workers& w) {
  const std::size_t n = M.n;
  std::vector<double> vr(n), vi(n);
  for (std::size_t k = n - 1; k-- > 0;) {
    const std::size_t len = n - k;
    DD nrm;
    for (std::size_t i = 0; i < len; ++i) {
      vr[i] = rng.normal();
      vi[i] = M.complex ? rng.normal() : 0.0;
      nrm += dd::two_prod(vr[i], vr[i]) + dd::two_prod(vi[i], vi[i]);
    }
    const DD tau = DD(2.0) / nrm;
    w.for_n(n, [&](std::size_t j) {
      DD* xr = &M.re[j * n + k];
      DD* xi = M.complex ? &M.im[j * n + k] : nullptr;
      DD wr, wi;  // v^* x
      for (std::size_t i = 0; i < len; ++i) {
        wr += xr[i] * DD(vr[i]);
        if (xi) {
          wr += xi[i] * DD(vi[i]);
          wi += xi[i] * DD(vr[i]) - xr[i] * DD(vi[i]);
        }
      }
      wr *= tau;
      wi *= tau;
      for (std::size_t i = 0; i < len; ++i) {
        if (xi) {
          xr[i] -= wr * DD(vr[i]) - wi * DD(vi[i]);
          xi[i] -= wr * DD(vi[i]) + wi * DD(vr[i]);
        } else {
          xr[i] -= wr * DD(vr[i]);
        }
      }
    });
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!M.complex) {
      if (rng() >> 63)
        for (std::size_t j = 0; j < n; ++j) M.r(i, j) = -M.r(i, j);
      continue;
    }
    const double x = rng.normal(), y = rng.normal();
    const DD h = sqrt(dd::two_prod(x, x) + dd::two_prod(y, y));
    const DD pr = DD(x) / h, pi = DD(y) / h;
    for (std::size_t j = 0; j < n; ++j) {
      const DD a = M.r(i, j), b = M.i_(i, j);
      M.r(i, j) = pr * a - pi * b;
      M.i_(i, j) = pr * b + pi * a;
    }
  }
}

}  // namespace

GenSVD gen_svd_matrix(const SpectrumSpec& spec, std::uint64_t seed, bool complex, std::size_t s,
                      unsigned workers) {
  GenSVD out;
  out.sigma = spectrum(spec, seed);
  const std::size_t n = spec.n;
  DDMatrix M(n, complex);
  for (std::size_t i = 0; i < n; ++i) M.r(i, i) = DD(out.sigma[i]);
  Workers w(workers);
  w.run([&] {
    SplitMix64 left(seed, 1), right(seed, 2);
    random_unitary_left(M, left, w);  // Q1 Sigma
    M.conj_transpose();               // Sigma Q1^*
    random_unitary_left(M, right, w); // Q2 Sigma Q1^*
    M.conj_transpose();               // Q1 Sigma Q2^*
  });
  out.G = SplitMatrix::zeros(n, n, complex, s);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      out.G.re_at(i, j) = M.r(i, j).to_double();
      if (complex) out.G.im_at(i, j) = M.i_(i, j).to_double();
    }
  return out;
}

namespace {
constexpr char kLamMagic[9] = "JSVDLAM2";
}

void write_lambdas(const std::string& path, const std::vector<double>& lam1,
                   const std::vector<double>& lam2) {
  if (lam1.size() != lam2.size()) throw std::invalid_argument("eigenvalue arrays differ in length");
  binio::Writer w(path);
  w.bytes(kLamMagic, 8);
  w.put<std::uint64_t>(lam1.size());
  w.doubles(lam1.data(), lam1.size());
  w.doubles(lam2.data(), lam2.size());
}

void read_lambdas(const std::string& path, std::vector<double>& lam1, std::vector<double>& lam2) {
  binio::Reader r(path);
  r.expect_magic(kLamMagic);
  const auto n = r.get<std::uint64_t>();
  if (n > (1ull << 36)) throw std::runtime_error("implausible size in " + path);
  lam1.resize(n);
  lam2.resize(n);
  r.doubles(lam1.data(), n);
  r.doubles(lam2.data(), n);
}

void write_sigma_csv(const std::string& path, const std::vector<double>& sigma,
                     const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << header << "j,sigma\n";
  char buf[64];
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", j, sigma[j]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> read_sigma_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<double> s;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("j,", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("malformed row in " + path + ": " + line);
    s.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
  }
  return s;
}

}  // namespace jsvd
