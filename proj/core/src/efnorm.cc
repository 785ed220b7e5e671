#include "jsvd/efnorm.hpp"

#include <stdexcept>

#include "jsvd/aligned.hpp"
#include "jsvd/splitform.hpp"

namespace jsvd {

namespace {

// Zero lanes leave the partial sums unchanged, so padding a copy is exact.
const double* padded(const double* x, std::size_t& len, AlignedVec& buf) {
  if (len % lanes::Native::width == 0) return x;
  buf.assign(x, x + len);
  buf.resize(pad_length(len, lanes::Native::width), 0.0);
  len = buf.size();
  return buf.data();
}

void require_finite(const double* x, std::size_t len) {
  if (x && kern::max_abs<lanes::Native>(x, len) == FloatEnv::inf)
    throw std::invalid_argument("non-finite element in norm input");
}

EFNumber checked(EFNumber r) {
  if (!r.finite()) throw std::invalid_argument("non-finite element in norm input");
  return r;
}

template <int S>
void append_network(std::vector<std::pair<std::vector<int>, LaneMask>>& out) {
  for (const BitonicStage& st : bitonic_stages<S>()) {
    std::vector<int> idx(S);
    for (int l = 0; l < S; ++l) idx[l] = l ^ st.partner;
    out.emplace_back(std::move(idx), st.upper);
  }
}

}  // namespace

std::vector<std::pair<std::vector<int>, LaneMask>> bitonic_network(int s) {
  std::vector<std::pair<std::vector<int>, LaneMask>> out;
  switch (s) {
    case 2: append_network<2>(out); break;
    case 4: append_network<4>(out); break;
    case 8: append_network<8>(out); break;
    case 16: append_network<16>(out); break;
    case 32: append_network<32>(out); break;
    default: throw std::invalid_argument("unsupported lane count");
  }
  return out;
}

EFNumber frob_norm_ef(const double* x, std::size_t len) {
  AlignedVec buf;
  x = padded(x, len, buf);
  require_finite(x, len);
  return checked(kern::frob_norm_ef<lanes::Native>(x, len));
}

EFNumber frob_norm_complex(const double* re, const double* im, std::size_t len) {
  if (!im) return frob_norm_ef(re, len);
  AlignedVec b1, b2;
  std::size_t l1 = len, l2 = len;
  re = padded(re, l1, b1);
  im = padded(im, l2, b2);
  require_finite(re, l1);
  require_finite(im, l2);
  return checked(kern::frob_norm_complex<lanes::Native>(re, im, l1));
}

double max_norm(const SplitMatrix& x) {
  auto plane = [](const AlignedVec& v) {
    AlignedVec buf;
    std::size_t len = v.size();
    const double* p = padded(v.data(), len, buf);
    return kern::max_abs<lanes::Native>(p, len);
  };
  double r = plane(x.re);
  if (x.complex) r = fp::vmax(plane(x.im), r);
  return r;
}

}  // namespace jsvd
