#include "rtc/bitstream.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>

#include "rtc/error.hpp"

namespace rtc {
namespace {

constexpr char kMagic[4] = {'R', 'T', 'C', '1'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <class T>
  void le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t>& data() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) throw FormatError(pos_, std::string("truncated ") + what);
  }
  template <class T>
  T le(const char* what) {
    need(sizeof(T), what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(in_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(le<std::uint64_t>(what)); }
  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::size_t sign_bytes(int subbands) { return (SubbandPyramid::total_size(subbands) + 7) / 8; }

}  // namespace

std::size_t header_length(int subbands) {
  return 4 + 1 + 4 + 1 + 4 + 1 + 8 + 4 + 4 * static_cast<std::size_t>(subbands) + 16 * 8 + 8 + 4 +
         sign_bytes(subbands);
}

std::vector<std::uint8_t> serialize(const SpikeStream& stream) {
  stream.validate();
  const auto& h = stream.header;
  Writer w;
  w.data().reserve(header_length(h.subbands) + stream.events.size() * bitstream::kEventBytes);
  w.bytes(kMagic, 4);
  w.le<std::uint8_t>(bitstream::kVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(h.n));
  w.le<std::uint8_t>(static_cast<std::uint8_t>(h.subbands));
  w.le<std::uint32_t>(h.horizon_us);
  w.le<std::uint8_t>(h.dithered ? 1 : 0);
  w.le<std::uint64_t>(h.seed);
  w.le<std::uint32_t>(h.t_star_us);
  for (auto t : h.schedule_us) w.le<std::uint32_t>(t);
  for (double v : h.params.to_block()) w.f64(v);
  w.f64(h.lowpass);
  const std::size_t nsign = sign_bytes(h.subbands);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(nsign));
  std::vector<std::uint8_t> bits(nsign, 0);
  for (std::size_t q = 0; q < stream.negative.size(); ++q) {
    if (stream.negative[q]) bits[q / 8] |= static_cast<std::uint8_t>(1u << (q % 8));
  }
  w.bytes(bits.data(), bits.size());
  for (const auto& ev : stream.events) {
    w.le<std::uint32_t>(ev.time_us);
    w.le<std::uint8_t>(ev.k);
    w.le<std::uint32_t>(ev.index);
  }
  return std::move(w.data());
}

SpikeStream parse(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  SpikeStream s;
  auto& h = s.header;

  const auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError(0, "bad magic");
  const std::size_t version_at = r.pos();
  if (r.le<std::uint8_t>("version") != bitstream::kVersion) throw FormatError(version_at, "unsupported version");
  const std::size_t n_at = r.pos();
  const auto n = r.le<std::uint32_t>("image side");
  if (n < 8 || n > (1u << 15) || (n & (n - 1)) != 0) throw FormatError(n_at, "image side is not a power of two >= 8");
  const std::size_t k_at = r.pos();
  const auto k = r.le<std::uint8_t>("subband count");
  if (k == 0 || k > 16 || (1u << (k - 1)) != n) throw FormatError(k_at, "subband count does not match the image side");
  h.n = static_cast<int>(n);
  h.subbands = k;
  const std::size_t horizon_at = r.pos();
  h.horizon_us = r.le<std::uint32_t>("horizon");
  const std::size_t flags_at = r.pos();
  const auto flags = r.le<std::uint8_t>("flags");
  if (flags & ~1u) throw FormatError(flags_at, "unknown flag bits");
  h.dithered = flags & 1u;
  h.seed = r.le<std::uint64_t>("seed");
  h.t_star_us = r.le<std::uint32_t>("t_star");
  for (int i = 0; i < k; ++i) {
    const std::size_t at = r.pos();
    const auto t = r.le<std::uint32_t>("schedule");
    if (t == 0 || (i > 0 && t <= h.schedule_us.back())) throw FormatError(at, "schedule not strictly increasing");
    h.schedule_us.push_back(t);
  }
  if (h.horizon_us < h.schedule_us.back()) throw FormatError(horizon_at, "horizon precedes the last subband delay");
  const std::size_t params_at = r.pos();
  std::array<double, 16> block{};
  for (double& v : block) v = r.f64("parameter block");
  h.params = RetinaParams::from_block(block);
  try {
    h.params.validate();
  } catch (const ConfigError& e) {
    throw FormatError(params_at, std::string("invalid parameter block: ") + e.what());
  }
  const std::size_t lowpass_at = r.pos();
  h.lowpass = r.f64("low-pass coefficient");
  if (!std::isfinite(h.lowpass)) throw FormatError(lowpass_at, "low-pass coefficient is not finite");
  const std::size_t nsign_at = r.pos();
  const auto nsign = r.le<std::uint32_t>("sign section length");
  if (nsign != sign_bytes(k)) throw FormatError(nsign_at, "sign section length does not match the pyramid");
  const auto bits = r.take(nsign, "sign bits");
  const std::size_t total = SubbandPyramid::total_size(k);
  s.negative.resize(total);
  for (std::size_t q = 0; q < total; ++q) s.negative[q] = (bits[q / 8] >> (q % 8)) & 1u;

  if (r.remaining() % bitstream::kEventBytes != 0) {
    const std::size_t cut = r.pos() + r.remaining() / bitstream::kEventBytes * bitstream::kEventBytes;
    throw FormatError(cut, "stream ends inside an event record");
  }
  s.events.reserve(r.remaining() / bitstream::kEventBytes);
  while (r.remaining() > 0) {
    const std::size_t at = r.pos();
    const std::string record = "event record " + std::to_string(s.events.size());
    SpikeEvent ev;
    ev.time_us = r.le<std::uint32_t>("event");
    ev.k = r.le<std::uint8_t>("event");
    ev.index = r.le<std::uint32_t>("event");
    if (ev.k >= k) throw FormatError(at, record + ": subband out of range");
    if (ev.index >= (1u << (2 * ev.k))) throw FormatError(at, record + ": index out of subband range");
    if (ev.time_us > h.horizon_us) throw FormatError(at, record + ": timestamp beyond the horizon");
    if (ev.time_us < h.schedule_us[ev.k]) throw FormatError(at, record + ": timestamp precedes the subband delay");
    if (!s.events.empty() && !(s.events.back() < ev)) throw FormatError(at, record + ": events not strictly sorted");
    s.events.push_back(ev);
  }
  return s;
}

std::vector<std::uint8_t> truncate_records(std::span<const std::uint8_t> bytes, std::size_t records) {
  if (bytes.size() < 10) throw FormatError(0, "stream too short");
  const int k = bytes[9];
  const std::size_t cut = header_length(k) + records * bitstream::kEventBytes;
  if (cut > bytes.size()) throw ConfigError("fewer event records than requested");
  return {bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut)};
}

}  // namespace rtc
