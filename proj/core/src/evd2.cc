#include "jsvd/evd2.hpp"

#include <cmath>
#include <stdexcept>

#include "jsvd/binio.hpp"
#include "jsvd/parallel.hpp"
#include "jsvd/splitform.hpp"

namespace jsvd {

namespace {

constexpr char kBatchMagic[9] = "JSVDB2X2";
constexpr char kEvdMagic[9] = "JSVDEVD2";

template <class B>
void run_chunks(const HermBatch2& b, EVDOut2& o, const Evd2Options& opt) {
  const std::size_t s = B::width;
  const std::size_t chunks = b.r_tilde / s;
  const kern::Batch2Ptrs in{b.a11.data(), b.a22.data(), b.re_a21.data(),
                            b.complex ? b.im_a21.data() : nullptr};
  auto body = [&](std::size_t c) {
    if (opt.skip && (*opt.skip)[c] == 0) return;
    const kern::Evd2Ptrs out{o.cos_phi.data(),
                             o.ca_tan.data(),
                             b.complex ? o.sa_tan.data() : nullptr,
                             o.lambda1.data(),
                             o.lambda2.data(),
                             &o.perm[c],
                             opt.defer_backscale ? o.neg_zeta.data() : nullptr,
                             opt.want_sines ? o.sin_re.data() : nullptr,
                             opt.want_sines && b.complex ? o.sin_im.data() : nullptr};
    if (b.complex)
      kern::zjac2<B>(c * s, in, out);
    else
      kern::djac2<B>(c * s, in, out);
  };
  Workers w(opt.workers);
  w.run([&] { w.for_n(chunks, body); });
}

}  // namespace

HermBatch2 HermBatch2::make(std::size_t r, bool complex, std::size_t s) {
  HermBatch2 b;
  b.r = r;
  b.s = s;
  b.r_tilde = pad_length(r, s);
  b.complex = complex;
  b.a11.assign(b.r_tilde, 0.0);
  b.a22.assign(b.r_tilde, 0.0);
  b.re_a21.assign(b.r_tilde, 0.0);
  if (complex) b.im_a21.assign(b.r_tilde, 0.0);
  return b;
}

void HermBatch2::require_finite() const {
  for (std::size_t j = 0; j < r; ++j) {
    const bool ok = std::isfinite(a11[j]) && std::isfinite(a22[j]) && std::isfinite(re_a21[j]) &&
                    (!complex || std::isfinite(im_a21[j]));
    if (!ok) throw std::invalid_argument("non-finite entry in 2x2 batch at index " + std::to_string(j));
  }
}

EVDOut2 EVDOut2::make(std::size_t r, bool complex, std::size_t s, bool deferred, bool sines) {
  EVDOut2 o;
  o.r = r;
  o.s = s;
  o.r_tilde = pad_length(r, s);
  o.complex = complex;
  o.cos_phi.assign(o.r_tilde, 0.0);
  o.ca_tan.assign(o.r_tilde, 0.0);
  if (complex) o.sa_tan.assign(o.r_tilde, 0.0);
  o.lambda1.assign(o.r_tilde, 0.0);
  o.lambda2.assign(o.r_tilde, 0.0);
  o.perm.assign(o.r_tilde / s, 0);
  if (deferred) o.neg_zeta.assign(o.r_tilde, 0.0);
  if (sines) {
    o.sin_re.assign(o.r_tilde, 0.0);
    if (complex) o.sin_im.assign(o.r_tilde, 0.0);
  }
  return o;
}

void evd2_batch_into(const HermBatch2& batch, EVDOut2& out, const Evd2Options& opt) {
  batch.require_finite();
  if (out.r_tilde != batch.r_tilde || out.s != batch.s || out.complex != batch.complex)
    throw std::invalid_argument("output shape does not match the batch");
  if (opt.defer_backscale && out.neg_zeta.size() != out.r_tilde)
    throw std::invalid_argument("deferred backscaling needs a neg_zeta plane");
  if (opt.want_sines && out.sin_re.size() != out.r_tilde)
    throw std::invalid_argument("sine output requested but not allocated");
  if (opt.skip && opt.skip->size() < batch.r_tilde / batch.s)
    throw std::invalid_argument("skip mask shorter than the chunk count");
  with_backend(batch.s, [&](auto tag) { run_chunks<decltype(tag)>(batch, out, opt); });
}

EVDOut2 evd2_batch(const HermBatch2& batch, const Evd2Options& opt) {
  EVDOut2 o = EVDOut2::make(batch.r, batch.complex, batch.s, opt.defer_backscale, opt.want_sines);
  evd2_batch_into(batch, o, opt);
  return o;
}

void write_batch(const std::string& path, const HermBatch2& b) {
  binio::Writer w(path);
  w.bytes(kBatchMagic, 8);
  w.put<std::uint64_t>(b.r);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(b.s));
  w.put<std::uint32_t>(b.complex ? 1u : 0u);
  w.doubles(b.a11.data(), b.r_tilde);
  w.doubles(b.a22.data(), b.r_tilde);
  w.doubles(b.re_a21.data(), b.r_tilde);
  if (b.complex) w.doubles(b.im_a21.data(), b.r_tilde);
}

HermBatch2 read_batch(const std::string& path) {
  binio::Reader r(path);
  r.expect_magic(kBatchMagic);
  const auto n = r.get<std::uint64_t>();
  const auto s = r.get<std::uint32_t>();
  const auto flags = r.get<std::uint32_t>();
  if (s == 0 || (s & (s - 1)) != 0 || s > 32) throw std::runtime_error("bad lane count in " + path);
  if (n > (1ull << 36)) throw std::runtime_error("implausible batch size in " + path);
  HermBatch2 b = HermBatch2::make(n, (flags & 1u) != 0, s);
  r.doubles(b.a11.data(), b.r_tilde);
  r.doubles(b.a22.data(), b.r_tilde);
  r.doubles(b.re_a21.data(), b.r_tilde);
  if (b.complex) r.doubles(b.im_a21.data(), b.r_tilde);
  return b;
}

void write_evd(const std::string& path, const EVDOut2& o) {
  binio::Writer w(path);
  w.bytes(kEvdMagic, 8);
  w.put<std::uint64_t>(o.r);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(o.s));
  w.put<std::uint32_t>(o.complex ? 1u : 0u);
  w.doubles(o.cos_phi.data(), o.r_tilde);
  w.doubles(o.ca_tan.data(), o.r_tilde);
  if (o.complex) w.doubles(o.sa_tan.data(), o.r_tilde);
  w.doubles(o.lambda1.data(), o.r_tilde);
  w.doubles(o.lambda2.data(), o.r_tilde);
  const std::size_t nb = (o.s + 7) / 8;
  for (LaneMask p : o.perm)
    for (std::size_t k = 0; k < nb; ++k) w.put<std::uint8_t>(static_cast<std::uint8_t>(p >> (8 * k)));
}

EVDOut2 read_evd(const std::string& path) {
  binio::Reader r(path);
  r.expect_magic(kEvdMagic);
  const auto n = r.get<std::uint64_t>();
  const auto s = r.get<std::uint32_t>();
  const auto flags = r.get<std::uint32_t>();
  if (s == 0 || (s & (s - 1)) != 0 || s > 32) throw std::runtime_error("bad lane count in " + path);
  if (n > (1ull << 36)) throw std::runtime_error("implausible batch size in " + path);
  EVDOut2 o = EVDOut2::make(n, (flags & 1u) != 0, s, false, false);
  r.doubles(o.cos_phi.data(), o.r_tilde);
  r.doubles(o.ca_tan.data(), o.r_tilde);
  if (o.complex) r.doubles(o.sa_tan.data(), o.r_tilde);
  r.doubles(o.lambda1.data(), o.r_tilde);
  r.doubles(o.lambda2.data(), o.r_tilde);
  const std::size_t nb = (o.s + 7) / 8;
  for (LaneMask& p : o.perm) {
    p = 0;
    for (std::size_t k = 0; k < nb; ++k) p |= LaneMask(r.get<std::uint8_t>()) << (8 * k);
  }
  return o;
}

}  // namespace jsvd
