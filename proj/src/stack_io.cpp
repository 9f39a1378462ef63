#include "csws/stack_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace csws {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'W', 'S'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f64(std::string& buf, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof(bits));
  for (int b = 0; b < 8; ++b) {
    buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
}

std::uint32_t get_u32(const char* p) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(p[0])) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(p[1])) << 8) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(p[2])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(p[3])) << 24);
}

double get_f64(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) {
    bits = (bits << 8) | static_cast<unsigned char>(p[b]);
  }
  double x;
  std::memcpy(&x, &bits, sizeof(x));
  return x;
}

void put_block(std::string& buf,
               const std::vector<std::vector<TangentMatrix>>& block) {
  for (const auto& per_pos : block) {
    for (const TangentMatrix& tm : per_pos) {
      for (int i = 0; i < tm.count(); ++i) {
        for (int c = 0; c < tm.dim(); ++c) put_f64(buf, tm.rows(i, c));
      }
    }
  }
}

}  // namespace

void write_stack(const std::string& path, const FunctionStack& stack) {
  const int n_dec = stack.n_dec();
  const int n_pos = stack.n_pos();
  if (n_dec < 1 || n_pos < 1) {
    throw ArtifactError("write_stack: empty stack");
  }
  const int m = stack.value[0][0].count();
  const int d = stack.value[0][0].dim();
  const bool has_expected = !stack.expected.empty();

  std::string buf;
  buf.reserve(25 + static_cast<std::size_t>(n_dec + (has_expected ? n_dec - 1 : 0)) *
                       n_pos * m * d * 8);
  buf.append(kMagic, 4);
  put_u32(buf, kVersion);
  put_u32(buf, static_cast<std::uint32_t>(n_dec));
  put_u32(buf, static_cast<std::uint32_t>(n_pos));
  put_u32(buf, static_cast<std::uint32_t>(m));
  put_u32(buf, static_cast<std::uint32_t>(d));
  buf.push_back(has_expected ? 1 : 0);
  put_block(buf, stack.value);
  if (has_expected) put_block(buf, stack.expected);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

FunctionStack read_stack(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path);

  if (buf.size() < 25 || std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw ArtifactError(path + ": not a CSWS stack container");
  }
  const std::uint32_t version = get_u32(buf.data() + 4);
  if (version != kVersion) {
    throw ArtifactError(path + ": unsupported container version " +
                        std::to_string(version));
  }
  const std::uint32_t n_dec = get_u32(buf.data() + 8);
  const std::uint32_t n_pos = get_u32(buf.data() + 12);
  const std::uint32_t m = get_u32(buf.data() + 16);
  const std::uint32_t d = get_u32(buf.data() + 20);
  const bool has_expected = buf[24] != 0;
  if (n_dec < 1 || n_pos < 1 || m < 1 || d < 1) {
    throw ArtifactError(path + ": degenerate dimensions");
  }
  const std::size_t per_matrix = static_cast<std::size_t>(m) * d * 8;
  const std::size_t blocks =
      static_cast<std::size_t>(n_dec) + (has_expected ? n_dec - 1 : 0);
  const std::size_t expect_size = 25 + blocks * n_pos * per_matrix;
  if (buf.size() != expect_size) {
    throw ArtifactError(path + ": payload size mismatch");
  }

  FunctionStack stack;
  const char* p = buf.data() + 25;
  auto read_block = [&](std::vector<std::vector<TangentMatrix>>& block,
                        std::uint32_t count) {
    block.resize(count);
    for (std::uint32_t t = 0; t < count; ++t) {
      block[t].resize(n_pos);
      for (std::uint32_t pos = 0; pos < n_pos; ++pos) {
        TangentMatrix& tm = block[t][pos];
        tm.rows.resize(m, d);
        for (std::uint32_t i = 0; i < m; ++i) {
          for (std::uint32_t c = 0; c < d; ++c) {
            tm.rows(i, c) = get_f64(p);
            p += 8;
          }
        }
      }
    }
  };
  read_block(stack.value, n_dec);
  if (has_expected) read_block(stack.expected, n_dec - 1);
  return stack;
}

}  // namespace csws
