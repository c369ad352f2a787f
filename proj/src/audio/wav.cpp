#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "affect/audio.hpp"

namespace affect::audio {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(std::span<const unsigned char> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

std::uint16_t read_u16(std::span<const unsigned char> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

double decode_sample(const unsigned char* p, std::uint16_t format, int bits) {
  if (format == kFormatFloat) {
    std::uint32_t raw = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                        (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    float f = std::bit_cast<float>(raw);
    if (!std::isfinite(f)) return 0.0;
    return std::clamp(static_cast<double>(f), -1.0, 1.0);
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32: {
      auto v = static_cast<std::int32_t>(static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                                         (static_cast<std::uint32_t>(p[2]) << 16) |
                                         (static_cast<std::uint32_t>(p[3]) << 24));
      return v / 2147483648.0;
    }
    default:
      throw WavError("unsupported bits per sample: " + std::to_string(bits));
  }
}

}  // namespace

DecodedWav decode_wav(std::span<const unsigned char> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw WavError("not a RIFF/WAVE file");
  }

  std::uint16_t format = 0;
  int channels = 0;
  int rate = 0;
  int bits = 0;
  bool have_fmt = false;
  std::span<const unsigned char> data;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const auto* id = bytes.data() + pos;
    std::size_t size = read_u32(bytes, pos + 4);
    std::size_t body = pos + 8;
    std::size_t available = std::min(size, bytes.size() - body);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (available < 16) throw WavError("truncated fmt chunk");
      format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      rate = static_cast<int>(read_u32(bytes, body + 4));
      bits = read_u16(bytes, body + 14);
      if (format == kFormatExtensible && available >= 26) format = read_u16(bytes, body + 24);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.subspan(body, available);
    }
    pos = body + size + (size & 1U);
  }

  if (!have_fmt) throw WavError("missing fmt chunk");
  if (format != kFormatPcm && format != kFormatFloat) throw WavError("unsupported WAV encoding " + std::to_string(format));
  if (format == kFormatFloat && bits != 32) throw WavError("only 32-bit float WAV is supported");
  if (channels < 1 || rate < 1) throw WavError("invalid channel count or sample rate");
  if (bits != 8 && bits != 16 && bits != 24 && bits != 32) throw WavError("unsupported bits per sample");

  const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
  const std::size_t frames = data.size() / frame_bytes;

  DecodedWav out;
  out.sample_rate = rate;
  out.channels = channels;
  out.bits_per_sample = bits;
  out.mono.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      acc += decode_sample(data.data() + f * frame_bytes + static_cast<std::size_t>(c) * (bits / 8), format, bits);
    }
    out.mono[f] = acc / channels;
  }
  return out;
}

std::vector<double> resample_linear(std::span<const double> samples, int from_rate, int to_rate) {
  if (from_rate == to_rate || samples.empty()) return {samples.begin(), samples.end()};
  const double ratio = static_cast<double>(from_rate) / to_rate;
  const auto n_out = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(static_cast<double>(samples.size()) * to_rate / from_rate)));
  std::vector<double> out(n_out);
  const std::size_t last = samples.size() - 1;
  for (std::size_t i = 0; i < n_out; ++i) {
    double t = static_cast<double>(i) * ratio;
    auto lo = static_cast<std::size_t>(t);
    if (lo >= last) {
      out[i] = samples[last];
      continue;
    }
    double frac = t - static_cast<double>(lo);
    out[i] = samples[lo] + (samples[lo + 1] - samples[lo]) * frac;
  }
  return out;
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  DecodedWav wav = decode_wav(bytes);
  auto mono = resample_linear(wav.mono, wav.sample_rate, kSampleRate);
  for (auto& s : mono) s = std::clamp(s, -1.0, 1.0);
  return AudioBuffer(std::move(mono));
}

void write_wav_pcm16(const std::filesystem::path& path, std::span<const double> samples, int sample_rate) {
  std::vector<unsigned char> out;
  out.reserve(44 + samples.size() * 2);
  auto put = [&out](std::uint32_t v, int n) {
    for (int i = 0; i < n; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFU));
  };
  auto put_tag = [&out](const char* tag) { out.insert(out.end(), tag, tag + 4); };
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);

  put_tag("RIFF");
  put(36 + data_bytes, 4);
  put_tag("WAVE");
  put_tag("fmt ");
  put(16, 4);
  put(kFormatPcm, 2);
  put(1, 2);
  put(static_cast<std::uint32_t>(sample_rate), 4);
  put(static_cast<std::uint32_t>(sample_rate) * 2, 4);
  put(2, 2);
  put(16, 2);
  put_tag("data");
  put(data_bytes, 4);
  for (double s : samples) {
    long v = std::lround(std::clamp(s, -1.0, 1.0) * 32767.0);
    put(static_cast<std::uint32_t>(static_cast<std::uint16_t>(static_cast<std::int16_t>(v))), 2);
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw WavError("cannot write " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw WavError("short write to " + path.string());
}

}  // namespace affect::audio
