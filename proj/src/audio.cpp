#include "sonoforge/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

namespace sonoforge {

void validate(const AudioClip& clip) {
  require(clip.sample_rate > 0, ErrorCode::InvalidArgument,
          "audio clip: sample_rate must be positive");
  require(!clip.samples.empty(), ErrorCode::EmptyClip, "audio clip: empty clip");
  for (double v : clip.samples)
    require(std::isfinite(v), ErrorCode::InvalidArgument,
            "audio clip: non-finite sample");
}

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

std::uint16_t read_u16(const unsigned char* p) {
  return std::uint16_t(p[0]) | std::uint16_t(p[1]) << 8;
}

double decode_sample(const unsigned char* p, int bits, bool is_float) {
  if (is_float) {
    float f;
    std::uint32_t u = read_u32(p);
    std::memcpy(&f, &u, 4);
    return static_cast<double>(f);
  }
  switch (bits) {
    case 8:  // unsigned
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      std::int16_t v = static_cast<std::int16_t>(read_u16(p));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = std::int32_t(p[0]) | std::int32_t(p[1]) << 8 |
                       std::int32_t(p[2]) << 16;
      if (v & 0x800000) v |= ~0xFFFFFF;  // sign extend
      return v / 8388608.0;
    }
    case 32: {
      std::int32_t v = static_cast<std::int32_t>(read_u32(p));
      return v / 2147483648.0;
    }
    default:
      raise(ErrorCode::UnsupportedCodec, "wav: unsupported bit depth");
  }
}

}  // namespace

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::FileNotFound, "wav: cannot open " + path.string());
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  require(data.size() >= 12, ErrorCode::MalformedWav, "wav: truncated header");
  require(std::memcmp(data.data(), "RIFF", 4) == 0 &&
              std::memcmp(data.data() + 8, "WAVE", 4) == 0,
          ErrorCode::MalformedWav, "wav: not a RIFF/WAVE file");

  int channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::uint16_t format = 0;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_len = 0;
  bool have_fmt = false, have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const char* id = reinterpret_cast<const char*>(data.data() + pos);
    std::uint32_t len = read_u32(data.data() + pos + 4);
    pos += 8;
    if (pos + len > data.size())
      raise(ErrorCode::MalformedWav, "wav: chunk extends past end of file");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      require(len >= 16, ErrorCode::MalformedWav, "wav: fmt chunk too short");
      format = read_u16(data.data() + pos);
      channels = read_u16(data.data() + pos + 2);
      rate = read_u32(data.data() + pos + 4);
      bits = read_u16(data.data() + pos + 14);
      if (format == 0xFFFE) {  // extensible: subformat tag leads the GUID
        require(len >= 40, ErrorCode::MalformedWav, "wav: extensible fmt too short");
        format = read_u16(data.data() + pos + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      pcm = data.data() + pos;
      pcm_len = len;
      have_data = true;
    }
    pos += len + (len & 1);  // chunks are word aligned
  }

  require(have_fmt && have_data, ErrorCode::MalformedWav,
          "wav: missing fmt or data chunk");
  require(channels >= 1 && rate > 0, ErrorCode::MalformedWav,
          "wav: invalid fmt fields");
  const bool is_float = format == 3;
  if (is_float)
    require(bits == 32, ErrorCode::UnsupportedCodec,
            "wav: only 32-bit float is supported");
  else
    require(format == 1 && (bits == 8 || bits == 16 || bits == 24 || bits == 32),
            ErrorCode::UnsupportedCodec, "wav: unsupported codec");

  const std::size_t bytes_per = static_cast<std::size_t>(bits) / 8;
  const std::size_t frame_bytes = bytes_per * channels;
  const std::size_t frames = pcm_len / frame_bytes;
  require(frames >= 1, ErrorCode::EmptyClip, "wav: empty clip");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c)
      acc += decode_sample(pcm + i * frame_bytes + c * bytes_per, bits, is_float);
    clip.samples[i] = acc / channels;
  }
  validate(clip);
  return clip;
}

void save_wav(const AudioClip& clip, const std::filesystem::path& path) {
  validate(clip);
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "wav: cannot write " + path.string());

  const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
  const std::uint32_t data_len = n * 2;
  const std::uint32_t rate = static_cast<std::uint32_t>(clip.sample_rate);

  auto put_u32 = [&](std::uint32_t v) {
    char b[4] = {char(v), char(v >> 8), char(v >> 16), char(v >> 24)};
    out.write(b, 4);
  };
  auto put_u16 = [&](std::uint16_t v) {
    char b[2] = {char(v), char(v >> 8)};
    out.write(b, 2);
  };

  out.write("RIFF", 4);
  put_u32(36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(rate);
  put_u32(rate * 2);  // byte rate
  put_u16(2);         // block align
  put_u16(16);
  out.write("data", 4);
  put_u32(data_len);

  const double hi = 1.0 - std::ldexp(1.0, -15);
  for (double v : clip.samples) {
    const double c = std::clamp(v, -1.0, hi);
    const auto code = static_cast<std::int16_t>(std::lround(c * 32768.0));
    put_u16(static_cast<std::uint16_t>(code));
  }
  require(out.good(), ErrorCode::IoError, "wav: write failed " + path.string());
}

namespace {

// Zeroth-order modified Bessel function, power series.
double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (k * k);
    sum += term;
    if (term < sum * 1e-16) break;
  }
  return sum;
}

double kaiser(double u, double beta) {
  if (std::abs(u) > 1.0) return 0.0;
  return bessel_i0(beta * std::sqrt(1.0 - u * u)) / bessel_i0(beta);
}

constexpr double kKaiserBeta = 7.0;

double sinc_kernel(double u, double cutoff, int half_taps) {
  const double x = 2.0 * cutoff * u;
  double s;
  if (std::abs(x) < 1e-12)
    s = 2.0 * cutoff;
  else
    s = std::sin(std::numbers::pi * x) / (std::numbers::pi * u);
  return s * kaiser(u / half_taps, kKaiserBeta);
}

}  // namespace

double sinc_interpolate(const std::vector<double>& x, double t, double cutoff,
                        int half_taps) {
  const long k0 = static_cast<long>(std::floor(t)) - half_taps + 1;
  const long k1 = static_cast<long>(std::floor(t)) + half_taps;
  const long n = static_cast<long>(x.size());
  double acc = 0.0;
  for (long k = std::max(0L, k0); k <= std::min(n - 1, k1); ++k)
    acc += x[k] * sinc_kernel(t - k, cutoff, half_taps);
  return acc;
}

AudioClip resample(const AudioClip& clip, double new_rate) {
  validate(clip);
  require(new_rate > 0.0, ErrorCode::InvalidArgument,
          "resample: new_rate must be positive");
  if (new_rate == clip.sample_rate) return clip;

  const double ratio = new_rate / clip.sample_rate;
  const auto out_len =
      static_cast<std::size_t>(std::llround(clip.samples.size() * ratio));
  require(out_len >= 1, ErrorCode::InvalidArgument,
          "resample: output would be empty");

  // Downsampling stretches the kernel by 1/ratio to keep the anti-alias
  // cutoff below the new Nyquist.
  const double cutoff = 0.46 * std::min(1.0, ratio);
  const int half_taps =
      static_cast<int>(std::ceil(32.0 / std::min(1.0, ratio)));

  AudioClip out;
  out.sample_rate = static_cast<int>(std::lround(new_rate));
  if (out.sample_rate < 1) out.sample_rate = 1;
  out.samples.resize(out_len);
  const double step = 1.0 / ratio;
  for (std::size_t i = 0; i < out_len; ++i)
    out.samples[i] = sinc_interpolate(clip.samples, i * step, cutoff, half_taps);
  return out;
}

}  // namespace sonoforge
