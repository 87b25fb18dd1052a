#pragma once

// Portable graymap I/O: binary (P5) and ASCII (P2), 8-bit (maxval <= 255).

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tvis/grid.hpp"

namespace tvis {

enum class PgmEncoding { binary, ascii };

namespace detail {

/// Next header token, skipping whitespace and '#' comments.
inline std::string pgm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {}
      continue;
    }
    if (!std::isspace(ch)) {
      tok.push_back(static_cast<char>(ch));
      break;
    }
  }
  while ((ch = in.peek()) != EOF && !std::isspace(ch) && ch != '#') tok.push_back(static_cast<char>(in.get()));
  return tok;
}

inline std::size_t pgm_number(std::istream& in, const char* what) {
  const std::string tok = pgm_token(in);
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw IoError(std::string("pgm: malformed header field '") + what + "'");
  return std::stoul(tok);
}

/// Clamp to [0, 255] and round half away from zero.
inline std::uint8_t to_byte(double v) {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::round(v));
}

}  // namespace detail

inline Image decode_pgm(std::istream& in) {
  const std::string magic = detail::pgm_token(in);
  if (magic != "P5" && magic != "P2") throw IoError("pgm: not a P2/P5 graymap");
  const std::size_t cols = detail::pgm_number(in, "width");
  const std::size_t rows = detail::pgm_number(in, "height");
  const std::size_t maxval = detail::pgm_number(in, "maxval");
  if (rows == 0 || cols == 0) throw IoError("pgm: empty image");
  if (maxval == 0 || maxval > 255) throw IoError("pgm: unsupported maxval " + std::to_string(maxval));

  Image img(rows, cols);
  if (magic == "P5") {
    in.get();  // single whitespace after maxval
    std::vector<char> buf(rows * cols);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) throw IoError("pgm: truncated payload");
    for (std::size_t i = 0; i < buf.size(); ++i) img[i] = static_cast<unsigned char>(buf[i]);
  } else {
    for (std::size_t i = 0; i < rows * cols; ++i) {
      const std::string tok = detail::pgm_token(in);
      if (tok.empty()) throw IoError("pgm: truncated payload");
      if (tok.find_first_not_of("0123456789") != std::string::npos) throw IoError("pgm: malformed sample");
      const unsigned long v = std::stoul(tok);
      if (v > maxval) throw IoError("pgm: sample exceeds maxval");
      img[i] = static_cast<double>(v);
    }
  }
  return img;
}

inline void encode_pgm(std::ostream& out, const Image& img, PgmEncoding enc = PgmEncoding::binary) {
  out << (enc == PgmEncoding::binary ? "P5" : "P2") << '\n'
      << img.cols() << ' ' << img.rows() << "\n255\n";
  if (enc == PgmEncoding::binary) {
    std::vector<char> buf(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) buf[i] = static_cast<char>(detail::to_byte(img[i]));
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  } else {
    for (std::size_t n = 0; n < img.rows(); ++n) {
      for (std::size_t m = 0; m < img.cols(); ++m)
        out << (m ? " " : "") << static_cast<int>(detail::to_byte(img(n, m)));
      out << '\n';
    }
  }
}

inline Image read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return decode_pgm(in);
}

inline void write_image(const std::string& path, const Image& img, PgmEncoding enc = PgmEncoding::binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  encode_pgm(out, img, enc);
  if (!out) throw IoError("write failed for '" + path + "'");
}

/// Pixel values after a write/read round trip.
inline Image quantize(const Image& img) {
  Image q(img.rows(), img.cols());
  for (std::size_t i = 0; i < img.size(); ++i) q[i] = detail::to_byte(img[i]);
  return q;
}

}  // namespace tvis
