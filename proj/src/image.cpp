#include "sonoforge/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace sonoforge {

void validate(const GrayImage& img) {
  require(img.rows >= 1 && img.cols >= 1, ErrorCode::InvalidArgument,
          "gray image: rows and cols must be >= 1");
  require(img.pixels.size() == std::size_t(img.rows) * img.cols,
          ErrorCode::ShapeMismatch, "gray image: pixel buffer size mismatch");
}

GrayImage to_gray(const TimeFreqMatrix& m) {
  require(m.rows >= 1 && m.cols >= 1, ErrorCode::InvalidArgument,
          "to_gray: empty matrix");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : m.values) {
    require(std::isfinite(v), ErrorCode::InvalidArgument,
            "to_gray: non-finite entry");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  GrayImage img;
  img.rows = m.rows;
  img.cols = m.cols;
  img.pixels.resize(m.values.size());
  if (hi == lo) {
    std::fill(img.pixels.begin(), img.pixels.end(), std::uint8_t{0});
    return img;
  }
  const double span = hi - lo;
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    const double p = std::floor(255.0 * (m.values[i] - lo) / span);
    img.pixels[i] = static_cast<std::uint8_t>(std::clamp(p, 0.0, 255.0));
  }
  return img;
}

namespace {

void append_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

void append_png_chunk(std::vector<std::uint8_t>& out, const char type[4],
                      const std::vector<std::uint8_t>& payload) {
  append_u32_be(out, static_cast<std::uint32_t>(payload.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  const auto crc = crc32(0, out.data() + crc_start, uInt(out.size() - crc_start));
  append_u32_be(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  // Raw scanlines, filter byte 0 per row.
  std::vector<std::uint8_t> raw;
  raw.reserve(std::size_t(img.rows) * (img.cols + 1));
  for (int r = 0; r < img.rows; ++r) {
    raw.push_back(0);
    raw.insert(raw.end(), img.pixels.begin() + std::size_t(r) * img.cols,
               img.pixels.begin() + std::size_t(r + 1) * img.cols);
  }
  uLongf comp_len = compressBound(uLong(raw.size()));
  std::vector<std::uint8_t> comp(comp_len);
  require(compress2(comp.data(), &comp_len, raw.data(), uLong(raw.size()), 9) ==
              Z_OK,
          ErrorCode::IoError, "png: deflate failed");
  comp.resize(comp_len);

  static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  std::vector<std::uint8_t> out(sig, sig + 8);

  std::vector<std::uint8_t> ihdr;
  append_u32_be(ihdr, std::uint32_t(img.cols));
  append_u32_be(ihdr, std::uint32_t(img.rows));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // color type: grayscale
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter method
  ihdr.push_back(0);  // no interlace
  append_png_chunk(out, "IHDR", ihdr);
  append_png_chunk(out, "IDAT", comp);
  append_png_chunk(out, "IEND", {});
  return out;
}

std::uint32_t read_u32_be(const std::uint8_t* p) {
  return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 |
         std::uint32_t(p[2]) << 8 | std::uint32_t(p[3]);
}

GrayImage decode_png(const std::vector<std::uint8_t>& data,
                     const std::string& name) {
  static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  require(data.size() > 8 && std::memcmp(data.data(), sig, 8) == 0,
          ErrorCode::ParseError, "png: bad signature: " + name);

  std::uint32_t width = 0, height = 0;
  std::vector<std::uint8_t> idat;
  std::size_t pos = 8;
  while (pos + 8 <= data.size()) {
    const std::uint32_t len = read_u32_be(data.data() + pos);
    require(pos + 12 + len <= data.size(), ErrorCode::ParseError,
            "png: truncated chunk: " + name);
    const char* type = reinterpret_cast<const char*>(data.data() + pos + 4);
    const std::uint8_t* payload = data.data() + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      require(len == 13, ErrorCode::ParseError, "png: bad IHDR: " + name);
      width = read_u32_be(payload);
      height = read_u32_be(payload + 4);
      require(payload[8] == 8 && payload[9] == 0 && payload[12] == 0,
              ErrorCode::UnsupportedCodec,
              "png: only 8-bit grayscale non-interlaced is supported: " + name);
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), payload, payload + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  require(width > 0 && height > 0 && !idat.empty(), ErrorCode::ParseError,
          "png: missing IHDR or IDAT: " + name);

  const std::size_t stride = width + 1;
  std::vector<std::uint8_t> raw(std::size_t(height) * stride);
  uLongf raw_len = uLongf(raw.size());
  require(uncompress(raw.data(), &raw_len, idat.data(), uLong(idat.size())) ==
                  Z_OK &&
              raw_len == raw.size(),
          ErrorCode::ParseError, "png: inflate failed: " + name);

  GrayImage img;
  img.rows = int(height);
  img.cols = int(width);
  img.pixels.resize(std::size_t(height) * width);
  std::vector<std::uint8_t> prev(width, 0);
  for (std::uint32_t r = 0; r < height; ++r) {
    const std::uint8_t filter = raw[std::size_t(r) * stride];
    std::uint8_t* row = &img.pixels[std::size_t(r) * width];
    const std::uint8_t* src = &raw[std::size_t(r) * stride + 1];
    for (std::uint32_t c = 0; c < width; ++c) {
      const int a = c > 0 ? row[c - 1] : 0;   // left
      const int b = prev[c];                  // up
      const int cc = c > 0 ? prev[c - 1] : 0; // up-left
      int v = src[c];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: {
          const int p = a + b - cc;
          const int pa = std::abs(p - a), pb = std::abs(p - b),
                    pc = std::abs(p - cc);
          v += (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : cc);
          break;
        }
        default:
          raise(ErrorCode::ParseError, "png: unknown filter type: " + name);
      }
      row[c] = std::uint8_t(v & 0xFF);
    }
    std::copy(row, row + width, prev.begin());
  }
  return img;
}

}  // namespace

std::vector<std::uint8_t> encode_image(const GrayImage& img, ImageFormat format) {
  validate(img);
  if (format == ImageFormat::Png) return encode_png(img);
  std::string header = "P5\n" + std::to_string(img.cols) + " " +
                       std::to_string(img.rows) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

void export_image(const GrayImage& img, const std::filesystem::path& path,
                  ImageFormat format) {
  const auto bytes = encode_image(img, format);
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "image: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  require(out.good(), ErrorCode::IoError, "image: write failed " + path.string());
}

namespace {

GrayImage decode_pgm(const std::vector<std::uint8_t>& data,
                     const std::string& name) {
  std::size_t pos = 2;  // past "P5"
  auto next_token = [&]() -> long {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(data[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    long v = 0;
    bool any = false;
    while (pos < data.size() && std::isdigit(data[pos])) {
      v = v * 10 + (data[pos] - '0');
      ++pos;
      any = true;
    }
    require(any, ErrorCode::ParseError, "pgm: malformed header: " + name);
    return v;
  };
  const long w = next_token(), h = next_token(), maxval = next_token();
  require(maxval == 255, ErrorCode::UnsupportedCodec,
          "pgm: only maxval 255 is supported: " + name);
  require(w >= 1 && h >= 1, ErrorCode::ParseError, "pgm: bad dimensions: " + name);
  ++pos;  // single whitespace after maxval
  require(data.size() - pos >= std::size_t(w) * h, ErrorCode::ParseError,
          "pgm: truncated pixel data: " + name);
  GrayImage img;
  img.rows = int(h);
  img.cols = int(w);
  img.pixels.assign(data.begin() + pos, data.begin() + pos + w * h);
  return img;
}

}  // namespace

GrayImage import_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::FileNotFound,
          "image: cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  require(data.size() >= 2, ErrorCode::ParseError,
          "image: file too short: " + path.string());
  GrayImage img;
  if (data[0] == 'P' && data[1] == '5')
    img = decode_pgm(data, path.string());
  else
    img = decode_png(data, path.string());
  validate(img);
  return img;
}

GrayImage resize_bilinear(const GrayImage& img, int rows, int cols) {
  validate(img);
  require(rows >= 1 && cols >= 1, ErrorCode::InvalidArgument,
          "resize: target must be at least 1x1");
  GrayImage out;
  out.rows = rows;
  out.cols = cols;
  out.pixels.resize(std::size_t(rows) * cols);
  const double rs = rows > 1 ? double(img.rows - 1) / (rows - 1) : 0.0;
  const double cs = cols > 1 ? double(img.cols - 1) / (cols - 1) : 0.0;
  for (int r = 0; r < rows; ++r) {
    const double fr = r * rs;
    const int r0 = int(fr), r1 = std::min(r0 + 1, img.rows - 1);
    const double wr = fr - r0;
    for (int c = 0; c < cols; ++c) {
      const double fc = c * cs;
      const int c0 = int(fc), c1 = std::min(c0 + 1, img.cols - 1);
      const double wc = fc - c0;
      const double v = (1 - wr) * ((1 - wc) * img.at(r0, c0) + wc * img.at(r0, c1)) +
                       wr * ((1 - wc) * img.at(r1, c0) + wc * img.at(r1, c1));
      out.at(r, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

ImageFormat image_format_from_name(const std::string& name) {
  if (name == "png") return ImageFormat::Png;
  if (name == "pgm") return ImageFormat::Pgm;
  raise(ErrorCode::InvalidArgument, "unknown image format: " + name);
}

std::string image_format_extension(ImageFormat format) {
  return format == ImageFormat::Png ? ".png" : ".pgm";
}

}  // namespace sonoforge
