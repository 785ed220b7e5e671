#include "jsvd/svd.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <chrono>
#include <cmath>
#include <numeric>

#include "jsvd/evd2.hpp"
#include "jsvd/jacobi_kernels.hpp"
#include "jsvd/parallel.hpp"

namespace jsvd {

int scale_bound(std::size_t m, bool complex) {
  if (m == 0) throw std::invalid_argument("scale_bound: m must be positive");
  if (!complex) return 1023 - static_cast<int>(std::bit_width(m));
  // Largest k with 2^k * 4m * sqrt(2) <= omega = (2^53 - 1) 2^971. With
  // j = k - 969 this is 2^(2j+1) m^2 <= (2^53 - 1)^2, decided exactly.
  using u128 = unsigned __int128;
  const u128 R = u128((1ull << 53) - 1) * u128((1ull << 53) - 1);
  const u128 m2 = u128(m) * u128(m);
  for (int j = 60; j >= -40; --j) {
    const int sh = 2 * j + 1;
    const bool ok = sh >= 0 ? (sh < 128 && (m2 << sh) >> sh == m2 && (m2 << sh) <= R)
                            : m2 <= (R << -sh) && (R << -sh) >> -sh == R;
    if (ok) return j + 969;
  }
  throw std::invalid_argument("scale_bound: m out of range");
}

StepScaling step_scaling(double M_tilde, std::size_t m, bool complex) {
  const long ge = static_cast<long>(fp::getexp(M_tilde));
  return {(complex ? 1020L : 1022L) - ge, scale_bound(m, complex) - ge - 1};
}

namespace {

void scale_all(SplitMatrix& G, long e) {
  const double de = static_cast<double>(e);
  for (double& x : G.re) x = fp::scalef(x, de);
  for (double& x : G.im) x = fp::scalef(x, de);
}

double checked_max_norm(const SplitMatrix& G) {
  const double M = max_norm(G);
  if (M == FloatEnv::inf) throw numerical_failure("input has an infinite or NaN element");
  if (M == 0.0) throw numerical_failure("input is the zero matrix");
  return M;
}

}  // namespace

ScalingState initial_scale(SplitMatrix& G, std::size_t m, int bias) {
  ScalingState st;
  st.M_tilde = checked_max_norm(G);
  st.s = step_scaling(st.M_tilde, m, G.complex).bracket + bias;
  scale_all(G, st.s);
  st.M_tilde = fp::scalef(st.M_tilde, static_cast<double>(st.s));
  return st;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Appends k = nb - n columns c * e_(m+i) supported on k new rows, with c a
// power of two at the data's max-norm exponent so the scaling is unaffected.
SplitMatrix border(const SplitMatrix& G, std::size_t nb, double c) {
  const std::size_t k = nb - G.n;
  SplitMatrix B = SplitMatrix::zeros(G.m + k, nb, G.complex, G.s);
  for (std::size_t j = 0; j < G.n; ++j) {
    std::copy_n(G.re_col(j), G.m, B.re_col(j));
    if (G.complex) std::copy_n(G.im_col(j), G.m, B.im_col(j));
  }
  for (std::size_t i = 0; i < k; ++i) B.re_at(G.m + i, G.n + i) = c;
  return B;
}

struct Workspace {
  std::size_t slots;
  AlignedVec z_re, z_im, e1, f1, e2, f2;
  HermBatch2 batch;
  EVDOut2 evd;
  std::vector<LaneMask> cmask;
  std::vector<std::size_t> count;
  std::vector<double> mslot;
  std::vector<unsigned char> overflow;

  Workspace(std::size_t nb, bool complex, std::size_t s)
      : slots(nb / 2),
        z_re(slots, 0.0),
        z_im(slots, 0.0),
        e1(slots, 0.0),
        f1(slots, 1.0),
        e2(slots, 0.0),
        f2(slots, 1.0),
        batch(HermBatch2::make(slots, true, s)),
        evd(EVDOut2::make(slots, complex, s, false, false)),
        cmask(slots / s, 0),
        count(slots / s, 0),
        mslot(slots, 0.0),
        overflow(slots, 0) {
    batch.complex = complex;
    if (!complex) batch.im_a21.clear();
  }
};

template <class B>
class Driver {
 public:
  Driver(SplitMatrix& G, const SVDConfig& cfg, SVDResult& res, std::size_t m_b)
      : G_(G),
        V_(SplitMatrix::identity(G.n, G.complex, G.s)),
        cfg_(cfg),
        res_(res),
        n_(G.n),
        m_b_(m_b),
        cplx_(G.complex),
        J_(build_strategy(G.n, cfg.strategy)),
        ws_(G.n, G.complex, G.s),
        w_(cfg.workers),
        norms_(G.n),
        dirty_(G.n, 1),
        col_id_(G.n) {
    std::iota(col_id_.begin(), col_id_.end(), std::size_t(0));
    upsilon_ = FloatEnv::eps * std::sqrt(static_cast<double>(m_b_));
  }

  void run() {
    w_.run([&] { iterate(); });
  }

  SplitMatrix& V() { return V_; }
  const std::vector<EFNumber>& norms() const { return norms_; }
  const std::vector<std::size_t>& col_id() const { return col_id_; }
  long s() const { return st_.s; }

  void iterate() {
    auto t0 = Clock::now();
    st_ = initial_scale(G_, m_b_, cfg_.initial_scale_bias);
    res_.s0 = st_.s;
    res_.times.rescale += since(t0);

    std::size_t C = 0;
    for (; C < cfg_.max_sweeps; ++C) {
      std::size_t T = 0;
      for (std::size_t k = 0; k < J_.K; ++k) T += step(k);
      res_.sweep_T.push_back(T);
      if (T == 0) break;
    }
    res_.sweeps = C;
    res_.converged = C < cfg_.max_sweeps;
    t0 = Clock::now();
    refresh_dirty_norms();
    res_.times.norms += since(t0);
  }

 private:
  void rescale(long e) {
    scale_all(G_, e);
    st_.M_tilde = fp::scalef(st_.M_tilde, static_cast<double>(e));
    st_.s += e;
    std::fill(dirty_.begin(), dirty_.end(), 1);
    ++res_.rescalings;
  }

  EFNumber column_norm(std::size_t j) const {
    return kern::frob_norm_complex<B>(G_.re_col(j), G_.im_col(j), G_.m_tilde);
  }

  bool column_overflows(std::size_t j) const {
    if (cfg_.norm_overflow_above == FloatEnv::inf) return false;
    double M = kern::max_abs<B>(G_.re_col(j), G_.m_tilde);
    if (cplx_) M = fp::vmax(kern::max_abs<B>(G_.im_col(j), G_.m_tilde), M);
    return M > cfg_.norm_overflow_above;
  }

  void refresh_dirty_norms() {
    w_.for_n(n_, [&](std::size_t j) {
      if (!dirty_[j]) return;
      norms_[j] = column_norm(j);
      dirty_[j] = 0;
    });
  }

  // One step; returns the number of transformations t.
  std::size_t step(std::size_t k) {
    const std::size_t P = ws_.slots, s = B::width;
    auto t0 = Clock::now();
    const StepScaling sc = step_scaling(st_.M_tilde, m_b_, cplx_);
    if (sc.paren < 0) rescale(sc.bracket);
    res_.times.rescale += since(t0);

    // Column norms of the pivot columns that changed since they were last computed.
    for (;;) {
      t0 = Clock::now();
      w_.for_n(P, [&](std::size_t l) {
        const auto [p, q] = J_.at(k, l);
        bool o = false;
        for (std::size_t j : {std::size_t(p), std::size_t(q)}) {
          if (!dirty_[j]) continue;
          if (column_overflows(j)) {
            o = true;
            continue;
          }
          const EFNumber nj = column_norm(j);
          if (!nj.finite()) {
            o = true;
            continue;
          }
          norms_[j] = nj;
          dirty_[j] = 0;
        }
        ws_.overflow[l] = o;
      });
      const std::size_t o = std::count(ws_.overflow.begin(), ws_.overflow.end(), 1);
      res_.times.norms += since(t0);
      if (o == 0) break;
      t0 = Clock::now();
      const long s2 = step_scaling(st_.M_tilde, m_b_, cplx_).bracket;
      if (s2 >= 0) throw numerical_failure("column norm overflow persists after downscaling");
      rescale(s2);
      ++res_.overflow_retries;
      res_.times.rescale += since(t0);
    }

    // Scaled dot products, packed by slot.
    t0 = Clock::now();
    w_.for_n(P, [&](std::size_t l) {
      const auto [p, q] = J_.at(k, l);
      const EFNumber np = norms_[p], nq = norms_[q];
      if (np.is_zero() || nq.is_zero())
        throw numerical_failure("zero column encountered; the matrix is not of full column rank");
      if (cplx_) {
        const ScaledDot z = kern::zdpscl<B>(G_.re_col(q), G_.im_col(q), G_.re_col(p), G_.im_col(p),
                                            G_.m_tilde, nq, np);
        ws_.z_re[l] = z.re;
        ws_.z_im[l] = z.im;
      } else {
        ws_.z_re[l] = kern::ddpscl<B>(G_.re_col(q), G_.re_col(p), G_.m_tilde, nq, np);
      }
      ws_.e1[l] = np.e;
      ws_.f1[l] = np.f;
      ws_.e2[l] = nq.e;
      ws_.f2[l] = nq.f;
    });
    res_.times.dots += since(t0);

    // Convergence masks and scaled Grammians.
    t0 = Clock::now();
    const std::size_t chunks = P / s;
    w_.for_n(chunks, [&](std::size_t c) {
      const std::size_t i = c * s;
      const auto re = B::load(ws_.z_re.data() + i);
      const auto im = cplx_ ? B::load(ws_.z_im.data() + i) : B::zero();
      const LaneMask mask = cplx_ ? kern::check_convergence<B>(re, im, upsilon_)
                                  : kern::check_convergence<B>(re, upsilon_);
      ws_.cmask[c] = mask;
      ws_.count[c] = static_cast<std::size_t>(std::popcount(mask));
      if (mask == 0) return;
      const auto g = kern::form_grammians<B>(re, im, B::load(ws_.e1.data() + i),
                                             B::load(ws_.f1.data() + i), B::load(ws_.e2.data() + i),
                                             B::load(ws_.f2.data() + i));
      B::store(ws_.batch.a11.data() + i, g.a11);
      B::store(ws_.batch.a22.data() + i, g.a22);
      B::store(ws_.batch.re_a21.data() + i, g.re);
      if (cplx_) B::store(ws_.batch.im_a21.data() + i, g.im);
    });
    const std::size_t t = std::accumulate(ws_.count.begin(), ws_.count.end(), std::size_t(0));
    res_.times.gram += since(t0);

    // Batched EVD of the Grammians, skipping chunks with nothing to do.
    t0 = Clock::now();
    const kern::Batch2Ptrs in{ws_.batch.a11.data(), ws_.batch.a22.data(), ws_.batch.re_a21.data(),
                              cplx_ ? ws_.batch.im_a21.data() : nullptr};
    EVDOut2& o = ws_.evd;
    w_.for_n(chunks, [&](std::size_t c) {
      if (ws_.cmask[c] == 0) {
        o.perm[c] = 0;
        return;
      }
      const kern::Evd2Ptrs out{o.cos_phi.data(), o.ca_tan.data(), cplx_ ? o.sa_tan.data() : nullptr,
                               o.lambda1.data(), o.lambda2.data(), &o.perm[c],
                               nullptr,          nullptr,          nullptr};
      if (cplx_)
        kern::zjac2<B>(c * s, in, out);
      else
        kern::djac2<B>(c * s, in, out);
    });
    res_.times.evd += since(t0);

    // Rotations and swaps.
    t0 = Clock::now();
    std::vector<unsigned char> gs(P, 0);
    w_.for_n(P, [&](std::size_t l) {
      const auto [p, q] = J_.at(k, l);
      const bool pbit = (o.perm[l / s] >> (l % s)) & 1u;
      const bool cbit = (ws_.cmask[l / s] >> (l % s)) & 1u;
      ws_.mslot[l] = 0.0;
      if (!cbit) {
        if (pbit) swap_pair(p, q);
        return;
      }
      if (!cplx_ && cfg_.gram_schmidt) {
        const EFNumber np = norms_[p], nq = norms_[q];
        const double a21 = ws_.z_re[l];
        if (gs_trigger(np, nq, upsilon_)) {
          ws_.mslot[l] =
              kern::gram_schmidt_real<B>(G_.re_col(q), G_.re_col(p), G_.m_tilde, a21, nq, np);
          dirty_[q] = 1;
          gs[l] = 1;
          return;
        }
        if (gs_trigger(nq, np, upsilon_)) {
          ws_.mslot[l] =
              kern::gram_schmidt_real<B>(G_.re_col(p), G_.re_col(q), G_.m_tilde, a21, np, nq);
          dirty_[p] = 1;
          swap_pair(p, q);
          gs[l] = 1;
          return;
        }
      }
      RotationParams r;
      r.cos_phi = o.cos_phi[l];
      r.ca_tan = o.ca_tan[l];
      r.sa_tan = cplx_ ? o.sa_tan[l] : 0.0;
      r.swap = pbit;
      if (cplx_) {
        ws_.mslot[l] = kern::zjrot<B>(G_.re_col(p), G_.im_col(p), G_.re_col(q), G_.im_col(q),
                                      G_.m_tilde, r);
        kern::zjrot<B>(V_.re_col(p), V_.im_col(p), V_.re_col(q), V_.im_col(q), V_.m_tilde, r);
      } else {
        ws_.mslot[l] = kern::djrot<B>(G_.re_col(p), G_.re_col(q), G_.m_tilde, r);
        kern::djrot<B>(V_.re_col(p), V_.re_col(q), V_.m_tilde, r);
      }
      if (pbit) std::swap(col_id_[p], col_id_[q]);
      dirty_[p] = dirty_[q] = 1;
    });
    double M = 0.0;
    for (double x : ws_.mslot) M = fp::vmax(M, x);
    st_.M_tilde = fp::vmax(st_.M_tilde, M);
    res_.gs_steps += std::count(gs.begin(), gs.end(), 1);
    res_.times.rotate += since(t0);

#ifndef NDEBUG
    assert(G_.all_finite() && V_.all_finite());
    assert(G_.padding_is_zero() && V_.padding_is_zero());
#endif
    return t;
  }

  void swap_pair(std::size_t p, std::size_t q) {
    kern::swap_columns(G_.re_col(p), G_.re_col(q), G_.m_tilde);
    kern::swap_columns(V_.re_col(p), V_.re_col(q), V_.m_tilde);
    if (cplx_) {
      kern::swap_columns(G_.im_col(p), G_.im_col(q), G_.m_tilde);
      kern::swap_columns(V_.im_col(p), V_.im_col(q), V_.m_tilde);
    }
    std::swap(norms_[p], norms_[q]);
    std::swap(dirty_[p], dirty_[q]);
    std::swap(col_id_[p], col_id_[q]);
  }

  SplitMatrix& G_;
  SplitMatrix V_;
  const SVDConfig& cfg_;
  SVDResult& res_;
  std::size_t n_, m_b_;
  bool cplx_;
  StrategyTable J_;
  Workspace ws_;
  Workers w_;
  std::vector<EFNumber> norms_;
  std::vector<unsigned char> dirty_;
  std::vector<std::size_t> col_id_;
  ScalingState st_;
  double upsilon_ = 0;
};

// U <- scalef(U, -e_j) / f_j column-wise.
void normalize_columns(SplitMatrix& G, const std::vector<EFNumber>& norms) {
  for (std::size_t j = 0; j < G.n; ++j) {
    const double me = -norms[j].e, f = norms[j].f;
    double* re = G.re_col(j);
    for (std::size_t i = 0; i < G.m_tilde; ++i) re[i] = fp::scalef(re[i], me) / f;
    if (double* im = G.im_col(j))
      for (std::size_t i = 0; i < G.m_tilde; ++i) im[i] = fp::scalef(im[i], me) / f;
  }
}

}  // namespace

SVDResult svd_run(const SplitMatrix& G, const SVDConfig& cfg) {
  if (G.n == 0 || G.m < G.n) throw std::invalid_argument("svd_run: requires m >= n >= 1");
  if (cfg.max_sweeps == 0) throw std::invalid_argument("svd_run: max_sweeps must be positive");
  if (G.s != cfg.s) throw std::invalid_argument("svd_run: matrix lane count differs from config");
  SVDResult res;
  const double M0 = checked_max_norm(G);
  const std::size_t nb = pad_length(G.n, 2 * cfg.s);
  res.n_bordered = nb;
  SplitMatrix W = border(G, nb, fp::scalef(1.0, fp::getexp(M0)));

  with_backend(cfg.s, [&](auto tag) {
    using B = decltype(tag);
    Driver<B> d(W, cfg, res, W.m);
    d.run();
    auto t0 = Clock::now();
    std::vector<EFNumber> norms = d.norms();
    if (res.converged) normalize_columns(W, norms);
    res.s_final = d.s();

    // Strip the border and, optionally, sort by non-increasing sigma.
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < nb; ++j)
      if (d.col_id()[j] < G.n) keep.push_back(j);
    if (cfg.sort)
      std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
        return !ef_le(norms[a], norms[b]);
      });
    res.U = SplitMatrix::zeros(G.m, G.n, G.complex, G.s);
    res.V = SplitMatrix::zeros(G.n, G.n, G.complex, G.s);
    const SplitMatrix& V = d.V();
    for (std::size_t c = 0; c < keep.size(); ++c) {
      const std::size_t j = keep[c];
      std::copy_n(W.re_col(j), G.m, res.U.re_col(c));
      std::copy_n(V.re_col(j), G.n, res.V.re_col(c));
      if (G.complex) {
        std::copy_n(W.im_col(j), G.m, res.U.im_col(c));
        std::copy_n(V.im_col(j), G.n, res.V.im_col(c));
      }
      EFNumber sj = norms[j];
      if (!sj.is_zero()) sj.e -= static_cast<double>(res.s_final);
      res.sigma.push_back(sj);
    }
    res.times.finalize += since(t0);
  });
  return res;
}

}  // namespace jsvd
