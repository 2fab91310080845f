#include "lpbmm/io.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace lpbmm {

namespace fs = std::filesystem;

namespace {

constexpr std::array<char, 4> kEmbeddingMagic{'L', 'P', 'E', 'B'};
constexpr std::array<char, 4> kLabelMagic{'L', 'P', 'L', 'B'};
constexpr std::size_t kHeaderBytes = 16;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<unsigned char> read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed for " + path.string());
}

struct Header {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

// Reads only the header; `bytes` may hold just the first 16 bytes.
Header parse_header(const std::vector<unsigned char>& bytes, const std::array<char, 4>& magic,
                    const fs::path& path) {
  if (bytes.size() < kHeaderBytes) throw FormatError(path.string() + ": truncated header");
  if (std::memcmp(bytes.data(), magic.data(), 4) != 0) {
    throw FormatError(path.string() + ": bad magic, expected " + std::string(magic.data(), 4));
  }
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kFormatVersion) {
    throw FormatError(path.string() + ": unsupported version " + std::to_string(version));
  }
  return {get_u32(bytes.data() + 8), get_u32(bytes.data() + 12)};
}

std::vector<unsigned char> read_header_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<unsigned char> bytes(kHeaderBytes);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(kHeaderBytes));
  bytes.resize(static_cast<std::size_t>(in.gcount()));
  return bytes;
}

void check_payload(std::size_t have, std::uint64_t want, const fs::path& path) {
  if (have < want) {
    throw FormatError(path.string() + ": truncated payload (" + std::to_string(have) + " of " +
                      std::to_string(want) + " bytes)");
  }
  if (have > want) throw FormatError(path.string() + ": trailing bytes after payload");
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

EmbeddingFile read_embedding_file(const fs::path& path) {
  const auto bytes = read_all(path);
  const Header h = parse_header(bytes, kEmbeddingMagic, path);
  const std::uint64_t count = static_cast<std::uint64_t>(h.a) * h.b;
  check_payload(bytes.size() - kHeaderBytes, count * 4, path);
  EmbeddingFile file{h.a, h.b, std::vector<float>(count)};
  const unsigned char* p = bytes.data() + kHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i) file.payload[i] = std::bit_cast<float>(get_u32(p + 4 * i));
  return file;
}

LabelFile read_label_file(const fs::path& path) {
  const auto bytes = read_all(path);
  const Header h = parse_header(bytes, kLabelMagic, path);
  check_payload(bytes.size() - kHeaderBytes, static_cast<std::uint64_t>(h.a) * 4, path);
  LabelFile file{h.a, h.b, std::vector<std::uint32_t>(h.a)};
  const unsigned char* p = bytes.data() + kHeaderBytes;
  for (std::uint32_t i = 0; i < h.a; ++i) file.payload[i] = get_u32(p + 4 * i);
  return file;
}

void write_embedding_file(const fs::path& path, const EmbeddingFile& file) {
  if (file.payload.size() != static_cast<std::size_t>(file.n) * file.d) {
    throw DimensionError("embedding file: payload size does not match n*d");
  }
  std::vector<unsigned char> out(kEmbeddingMagic.begin(), kEmbeddingMagic.end());
  out.reserve(kHeaderBytes + 4 * file.payload.size());
  put_u32(out, kFormatVersion);
  put_u32(out, file.n);
  put_u32(out, file.d);
  for (float v : file.payload) put_u32(out, std::bit_cast<std::uint32_t>(v));
  write_all(path, out);
}

void write_label_file(const fs::path& path, const LabelFile& file) {
  if (file.payload.size() != file.n) throw DimensionError("label file: payload size != n");
  std::vector<unsigned char> out(kLabelMagic.begin(), kLabelMagic.end());
  put_u32(out, kFormatVersion);
  put_u32(out, file.n);
  put_u32(out, file.k);
  for (auto v : file.payload) put_u32(out, v);
  write_all(path, out);
}

Matrix to_checked_matrix(const EmbeddingFile& file) {
  Matrix m(static_cast<Index>(file.n), static_cast<Index>(file.d));
  for (std::uint32_t i = 0; i < file.n; ++i) {
    for (std::uint32_t j = 0; j < file.d; ++j) {
      m(i, j) = static_cast<double>(file.payload[static_cast<std::size_t>(i) * file.d + j]);
    }
  }
  normalize_rows_checked(m, "embedding file");
  return m;
}

EmbeddingFile to_embedding_file(const Matrix& rows) {
  EmbeddingFile file{static_cast<std::uint32_t>(rows.rows()), static_cast<std::uint32_t>(rows.cols()), {}};
  file.payload.reserve(static_cast<std::size_t>(rows.size()));
  for (Index i = 0; i < rows.rows(); ++i) {
    for (Index j = 0; j < rows.cols(); ++j) file.payload.push_back(static_cast<float>(rows(i, j)));
  }
  return file;
}

FeatureMatrix load_features(const fs::path& path) {
  return FeatureMatrix(to_checked_matrix(read_embedding_file(path)));
}

TextBank load_text_bank(const fs::path& path) {
  return TextBank(to_checked_matrix(read_embedding_file(path)));
}

LabelVector load_labels(const fs::path& path) {
  LabelFile file = read_label_file(path);
  return LabelVector(std::move(file.payload), file.k);
}

void write_features(const fs::path& path, const Matrix& rows) {
  write_embedding_file(path, to_embedding_file(rows));
}

void write_labels(const fs::path& path, const LabelVector& labels) {
  LabelFile file{static_cast<std::uint32_t>(labels.size()), static_cast<std::uint32_t>(labels.classes()),
                 {labels.values().begin(), labels.values().end()}};
  write_label_file(path, file);
}

TaskManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": empty key or value");
    }
    if (!kv.emplace(key, value).second) {
      throw FormatError(path.string() + ": duplicate key " + key);
    }
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto require = [&](const std::string& key) {
    auto v = take(key);
    if (!v) throw FormatError(path.string() + ": missing key " + key);
    return *v;
  };
  auto resolve = [&](const std::string& p) {
    fs::path q(p);
    return q.is_absolute() ? q : (base / q).lexically_normal();
  };
  auto parse_uint = [&](const std::string& key, const std::string& v) {
    std::size_t used = 0;
    unsigned long long out = 0;
    try {
      out = std::stoull(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || v.front() == '-') {
      throw FormatError(path.string() + ": " + key + " is not a non-negative integer");
    }
    return static_cast<std::uint64_t>(out);
  };

  TaskManifest m;
  m.text = resolve(require("text"));
  m.support_features = resolve(require("support_features"));
  m.support_labels = resolve(require("support_labels"));
  m.val_features = resolve(require("val_features"));
  m.val_labels = resolve(require("val_labels"));
  auto tf = take("test_features");
  auto tl = take("test_labels");
  if (tf.has_value() != tl.has_value()) {
    throw FormatError(path.string() + ": test_features and test_labels must appear together");
  }
  if (tf) {
    m.test_features = resolve(*tf);
    m.test_labels = resolve(*tl);
  }
  m.shots = static_cast<std::size_t>(parse_uint("shots", require("shots")));
  if (auto s = take("seed")) m.seed = parse_uint("seed", *s);
  if (!kv.empty()) throw FormatError(path.string() + ": unknown key " + kv.begin()->first);
  return m;
}

void write_manifest(const fs::path& path, const TaskManifest& m) {
  const fs::path base = fs::absolute(path).parent_path();
  auto rel = [&](const fs::path& p) {
    const fs::path r = fs::absolute(p).lexically_relative(base);
    if (r.empty() || *r.begin() == "..") return fs::absolute(p).generic_string();
    return r.generic_string();
  };
  std::ostringstream out;
  out << "text = " << rel(m.text) << "\n"
      << "support_features = " << rel(m.support_features) << "\n"
      << "support_labels = " << rel(m.support_labels) << "\n"
      << "val_features = " << rel(m.val_features) << "\n"
      << "val_labels = " << rel(m.val_labels) << "\n";
  if (m.test_features && m.test_labels) {
    out << "test_features = " << rel(*m.test_features) << "\n"
        << "test_labels = " << rel(*m.test_labels) << "\n";
  }
  out << "shots = " << m.shots << "\n"
      << "seed = " << m.seed << "\n";
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw InputError("cannot write manifest " + path.string());
  f << out.str();
}

LoadedTask load_task(const TaskManifest& m) {
  const auto emb = [](const fs::path& p) { return parse_header(read_header_bytes(p), kEmbeddingMagic, p); };
  const auto lab = [](const fs::path& p) { return parse_header(read_header_bytes(p), kLabelMagic, p); };

  const Header text = emb(m.text);
  const std::uint32_t k = text.a;
  const std::uint32_t d = text.b;
  auto check_pair = [&](const fs::path& fpath, const fs::path& lpath, const char* name) {
    const Header f = emb(fpath);
    const Header l = lab(lpath);
    if (f.b != d) {
      throw DimensionError(std::string(name) + ": embedding dim " + std::to_string(f.b) +
                           " != text dim " + std::to_string(d));
    }
    if (l.b != k) {
      throw DimensionError(std::string(name) + ": labels declare " + std::to_string(l.b) +
                           " classes, text bank has " + std::to_string(k));
    }
    if (f.a != l.a) {
      throw DimensionError(std::string(name) + ": " + std::to_string(f.a) + " embeddings but " +
                           std::to_string(l.a) + " labels");
    }
  };
  check_pair(m.support_features, m.support_labels, "support");
  check_pair(m.val_features, m.val_labels, "validation");
  if (m.test_features) check_pair(*m.test_features, *m.test_labels, "test");

  TextBank bank = load_text_bank(m.text);
  SupportSet support(load_features(m.support_features), load_labels(m.support_labels));
  LabeledSplit val{load_features(m.val_features), load_labels(m.val_labels)};
  std::optional<LabeledSplit> test;
  if (m.test_features) test = LabeledSplit{load_features(*m.test_features), load_labels(*m.test_labels)};
  LoadedTask out{std::move(bank), TaskSplit{std::move(support), std::move(val), std::move(test)},
                 m.shots, m.seed};
  out.split.validate(out.text);
  return out;
}

LoadedTask load_task(const fs::path& manifest_path) { return load_task(read_manifest(manifest_path)); }

}  // namespace lpbmm
