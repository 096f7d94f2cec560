#include "srs/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace srs {

void write_pgm(const ImageGrid& image, const std::filesystem::path& path, PgmFormat format) {
  constexpr int kMaxVal = 65535;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string());
  double top = 0.0;
  for (double v : image.values) top = std::max(top, v);
  auto sample = [top](double v) {
    if (!(top > 0.0)) return 0;
    return static_cast<int>(std::lround(std::clamp(v, 0.0, top) / top * kMaxVal));
  };
  os << (format == PgmFormat::Ascii ? "P2" : "P5") << '\n'
     << image.side << ' ' << image.side << '\n'
     << kMaxVal << '\n';
  if (format == PgmFormat::Ascii) {
    for (int r = 0; r < image.side; ++r) {
      for (int c = 0; c < image.side; ++c) {
        if (c) os << ' ';
        os << sample(image.values[static_cast<std::size_t>(r) * image.side + c]);
      }
      os << '\n';
    }
  } else {
    for (double v : image.values) {
      const int s = sample(v);
      os.put(static_cast<char>((s >> 8) & 0xff));
      os.put(static_cast<char>(s & 0xff));
    }
  }
  if (!os) throw IoError("write failed: " + path.string());
}

ImageGrid read_pgm_raw(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  is >> magic >> w >> h >> maxval;
  if ((magic != "P2" && magic != "P5") || w != h || w <= 0 || maxval <= 0 || maxval > 65535)
    throw IoError("unsupported PGM: " + path.string());
  is.get();
  ImageGrid img(w, 0.0);
  for (double& v : img.values) {
    if (magic == "P2") {
      int s = 0;
      is >> s;
      v = s;
    } else if (maxval > 255) {
      const int hi = is.get();
      const int lo = is.get();
      v = (hi << 8) | lo;
    } else {
      v = is.get();
    }
  }
  if (!is) throw IoError("truncated PGM: " + path.string());
  return img;
}

void write_labels_csv(const LabelMap& labels, int n, const std::filesystem::path& path) {
  if (labels.labels.size() != static_cast<std::size_t>(n) * n)
    throw ParameterError("write_labels_csv: label count is not n^2");
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (c) os << ',';
      os << labels.labels[static_cast<std::size_t>(r) * n + c];
    }
    os << '\n';
  }
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace srs
