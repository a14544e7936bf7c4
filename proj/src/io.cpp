#include "bofp/io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bofp/error.hpp"

namespace bofp::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::ofstream open_out(const fs::path& path, bool append = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  return in;
}

void write_provenance(std::ostream& out, const std::string& provenance) {
  if (provenance.empty()) return;
  std::istringstream lines(provenance);
  std::string line;
  while (std::getline(lines, line)) out << "# " << line << '\n';
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError(where + ": not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// Yields content lines with their 1-based line number; skips comments and blanks.
class LineReader {
 public:
  explicit LineReader(const fs::path& path) : in_(open_in(path)), name_(path.string()) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.find_first_not_of(" \t") == std::string::npos) continue;
      if (line.rfind("# ", 0) == 0 || line == "#") continue;
      return true;
    }
    return false;
  }

  std::string where() const { return name_ + ":" + std::to_string(line_no_); }

 private:
  std::ifstream in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

std::size_t parse_size(std::string_view s, const std::string& where) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError(where + ": expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

struct BlockHeader {
  std::string role;
  std::string model_id;
};

BlockHeader read_header(LineReader& r, std::string& line, const GridPtr& expected) {
  auto grid_tok = split_ws(line);
  if (grid_tok.size() != 3 || grid_tok[0] != "#grid") {
    throw DataError(r.where() + ": expected '#grid <n_lat> <n_lon>'");
  }
  const std::size_t n_lat = parse_size(grid_tok[1], r.where());
  const std::size_t n_lon = parse_size(grid_tok[2], r.where());
  if (n_lat != expected->n_lat() || n_lon != expected->n_lon()) {
    throw DataError(r.where() + ": grid " + std::to_string(n_lat) + "x" + std::to_string(n_lon) +
                    " does not match expected " + std::to_string(expected->n_lat()) + "x" +
                    std::to_string(expected->n_lon()));
  }
  if (!r.next(line)) throw DataError(r.where() + ": missing '#field' line");
  auto field_tok = split_ws(line);
  if (field_tok.size() != 3 || field_tok[0] != "#field") {
    throw DataError(r.where() + ": expected '#field <role> <model_id>'");
  }
  return {std::string(field_tok[1]), std::string(field_tok[2])};
}

}  // namespace

std::vector<LabeledField> read_field_file(const fs::path& path, const GridPtr& expected) {
  LineReader r(path);
  std::vector<LabeledField> out;
  std::string line;
  bool have = r.next(line);
  if (!have) throw DataError(path.string() + ": no field blocks");
  const std::size_t n = expected->n_grid();
  while (have) {
    BlockHeader h = read_header(r, line, expected);
    Eigen::VectorXd values(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (!r.next(line) || line[0] == '#') {
        throw DataError(r.where() + ": expected " + std::to_string(n) + " values, got " +
                        std::to_string(i));
      }
      auto tok = split_ws(line);
      if (tok.size() != 1) throw DataError(r.where() + ": expected one value per line");
      values(static_cast<Eigen::Index>(i)) = parse_double(tok[0], r.where());
    }
    out.push_back({h.role, h.model_id, FieldVector(expected, std::move(values))});
    have = r.next(line);
  }
  return out;
}

FieldVector load_gridded_field(const fs::path& path, const GridPtr& expected) {
  auto fields = read_field_file(path, expected);
  if (fields.size() != 1) {
    throw DataError(path.string() + ": expected exactly one field, found " +
                    std::to_string(fields.size()));
  }
  return std::move(fields.front().field);
}

void write_field_file(const fs::path& path, std::span<const LabeledField> fields,
                      const std::string& provenance) {
  auto out = open_out(path);
  write_provenance(out, provenance);
  for (const LabeledField& f : fields) {
    out << "#grid " << f.field.grid->n_lat() << ' ' << f.field.grid->n_lon() << '\n';
    out << "#field " << f.role << ' ' << f.model_id << '\n';
    for (Eigen::Index i = 0; i < f.field.values.size(); ++i) {
      out << format_double(f.field.values(i)) << '\n';
    }
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<GriddedSeries> read_series_file(const fs::path& path, const GridPtr& expected) {
  LineReader r(path);
  std::vector<GriddedSeries> out;
  std::string line;
  bool have = r.next(line);
  if (!have) throw DataError(path.string() + ": no series blocks");
  const std::size_t n = expected->n_grid();
  while (have) {
    BlockHeader h = read_header(r, line, expected);
    if (!r.next(line)) throw DataError(r.where() + ": missing '#times' line");
    auto tt = split_ws(line);
    if (tt.size() != 2 || tt[0] != "#times") throw DataError(r.where() + ": expected '#times <n>'");
    const std::size_t n_time = parse_size(tt[1], r.where());
    GriddedSeries s;
    s.grid = expected;
    s.role = h.role;
    s.model_id = h.model_id;
    s.times.resize(n_time);
    s.values.resize(static_cast<Eigen::Index>(n_time), static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n_time; ++t) {
      if (!r.next(line) || line[0] == '#') {
        throw DataError(r.where() + ": expected " + std::to_string(n_time) + " time rows, got " +
                        std::to_string(t));
      }
      auto tok = split_ws(line);
      if (tok.size() != n + 1) {
        throw DataError(r.where() + ": expected " + std::to_string(n + 1) + " columns, got " +
                        std::to_string(tok.size()));
      }
      s.times[t] = parse_double(tok[0], r.where());
      for (std::size_t i = 0; i < n; ++i) {
        s.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
            parse_double(tok[i + 1], r.where());
      }
    }
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    out.push_back(std::move(s));
    have = r.next(line);
  }
  return out;
}

void write_series_file(const fs::path& path, std::span<const GriddedSeries> series,
                       const std::string& provenance) {
  auto out = open_out(path);
  write_provenance(out, provenance);
  for (const GriddedSeries& s : series) {
    out << "#grid " << s.grid->n_lat() << ' ' << s.grid->n_lon() << '\n';
    out << "#field " << s.role << ' ' << s.model_id << '\n';
    out << "#times " << s.n_time() << '\n';
    for (std::size_t t = 0; t < s.n_time(); ++t) {
      out << format_double(s.times[t]);
      for (Eigen::Index i = 0; i < s.values.cols(); ++i) {
        out << ' ' << format_double(s.values(static_cast<Eigen::Index>(t), i));
      }
      out << '\n';
    }
  }
  if (!out) throw DataError("write failed: " + path.string());
}

void write_chain(const fs::path& path, const PosteriorSamples& samples,
                 const std::string& provenance) {
  auto out = open_out(path);
  write_provenance(out, provenance);
  out << "beta";
  for (Eigen::Index j = 0; j < samples.lambdas.cols(); ++j) out << ",lambda_" << (j + 1);
  out << '\n';
  for (Eigen::Index m = 0; m < samples.beta.size(); ++m) {
    out << format_double(samples.beta(m));
    for (Eigen::Index j = 0; j < samples.lambdas.cols(); ++j) {
      out << ',' << format_double(samples.lambdas(m, j));
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

namespace {

constexpr const char* kRecordHeader =
    "c,f,k,beta_mean,beta_sd,ci_low,ci_high,contains_one,crps,kappa_post,converged,n_iterations,"
    "error";

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_records(const fs::path& path, std::span<const FitRecord> records,
                   const std::string& provenance) {
  auto out = open_out(path);
  write_provenance(out, provenance);
  out << kRecordHeader << '\n';
  for (const FitRecord& r : records) {
    out << r.c << ',' << r.f << ',' << r.k << ',' << format_double(r.beta_mean) << ','
        << format_double(r.beta_sd) << ',' << format_double(r.ci_low) << ','
        << format_double(r.ci_high) << ',' << (r.contains_one ? 1 : 0) << ','
        << format_double(r.crps) << ',' << r.kappa_post << ',' << (r.converged ? 1 : 0) << ','
        << r.n_iterations << ',' << sanitize(r.error) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<FitRecord> read_records(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::vector<FitRecord> out;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (line != kRecordHeader) throw DataError(where + ": unexpected records header");
      header_seen = true;
      continue;
    }
    auto tok = split_csv(line);
    if (tok.size() != 13) throw DataError(where + ": expected 13 columns");
    FitRecord r;
    r.c = parse_size(tok[0], where);
    r.f = parse_size(tok[1], where);
    r.k = parse_size(tok[2], where);
    r.beta_mean = parse_double(tok[3], where);
    r.beta_sd = parse_double(tok[4], where);
    r.ci_low = parse_double(tok[5], where);
    r.ci_high = parse_double(tok[6], where);
    r.contains_one = tok[7] == "1";
    r.crps = parse_double(tok[8], where);
    r.kappa_post = static_cast<long>(parse_size(tok[9], where));
    r.converged = tok[10] == "1";
    r.n_iterations = static_cast<int>(parse_size(tok[11], where));
    r.error = tok[12];
    out.push_back(std::move(r));
  }
  if (!header_seen) throw DataError(path.string() + ": missing records header");
  return out;
}

void write_pair_aggregates(const fs::path& path, std::span<const PairAggregate> pairs,
                           const std::string& provenance) {
  auto out = open_out(path);
  write_provenance(out, provenance);
  out << "c,f,n,n_failed,coverage,rmse,mean_crps,median_kappa\n";
  for (const PairAggregate& p : pairs) {
    out << p.c << ',' << p.f << ',' << p.n << ',' << p.n_failed << ','
        << format_double(p.coverage) << ',' << format_double(p.rmse) << ','
        << format_double(p.mean_crps) << ',' << format_double(p.median_kappa) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

void write_control_summaries(const fs::path& path, std::span<const ControlSummary> summaries,
                             const std::string& provenance) {
  auto out = open_out(path);
  write_provenance(out, provenance);
  out << "c,metric,median,q25,q75,q05,q95,mean\n";
  auto row = [&](std::size_t c, const char* name, const Spread& s) {
    out << c << ',' << name << ',' << format_double(s.median) << ',' << format_double(s.q25) << ','
        << format_double(s.q75) << ',' << format_double(s.q05) << ',' << format_double(s.q95)
        << ',' << format_double(s.mean) << '\n';
  };
  for (const ControlSummary& s : summaries) {
    row(s.c, "coverage", s.coverage);
    row(s.c, "rmse", s.rmse);
    row(s.c, "crps", s.crps);
    row(s.c, "kappa", s.kappa);
  }
  if (!out) throw DataError("write failed: " + path.string());
}

void write_spectrum(const fs::path& path, const std::string& model_id,
                    const VarianceSpectrum& spectrum, const std::string& provenance, bool append) {
  const bool fresh = !append || !fs::exists(path);
  auto out = open_out(path, !fresh);
  if (fresh) {
    write_provenance(out, provenance);
    out << "model_id,basis,index,lambda\n";
  }
  for (Eigen::Index i = 0; i < spectrum.lambdas.size(); ++i) {
    out << model_id << ',' << to_string(spectrum.kind) << ',' << (i + 1) << ','
        << format_double(spectrum.lambdas(i)) << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

namespace {

constexpr std::array<char, 8> kMagic = {'B', 'O', 'F', 'P', 'B', 'A', 'S', '1'};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

template <typename T>
void put(std::string& buf, const T& v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(const std::string& buf, std::size_t& pos, T& v) {
  if (pos + sizeof(T) > buf.size()) return false;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return true;
}

}  // namespace

fs::path basis_cache_path(const fs::path& dir, const Grid& grid, KernelVariant variant) {
  return dir / ("laplace_" + std::to_string(grid.n_lat()) + "x" + std::to_string(grid.n_lon()) +
                "_" + to_string(variant) + ".bin");
}

void save_basis_cache(const fs::path& path, const BasisSet& basis, KernelVariant variant) {
  std::string buf(kMagic.begin(), kMagic.end());
  put<std::uint64_t>(buf, basis.grid->n_lat());
  put<std::uint64_t>(buf, basis.grid->n_lon());
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(variant));
  put<std::uint64_t>(buf, static_cast<std::uint64_t>(basis.n_basis()));
  put<std::uint64_t>(buf, static_cast<std::uint64_t>(basis.eigenvalues.size()));
  buf.append(reinterpret_cast<const char*>(basis.eigenvalues.data()),
             sizeof(double) * static_cast<std::size_t>(basis.eigenvalues.size()));
  buf.append(reinterpret_cast<const char*>(basis.vectors.data()),
             sizeof(double) * static_cast<std::size_t>(basis.vectors.size()));
  put<std::uint64_t>(buf, fnv1a(buf));

  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + tmp.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::optional<BasisSet> load_basis_cache(const fs::path& path, const GridPtr& grid,
                                         KernelVariant variant) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kMagic.size() + sizeof(std::uint64_t)) return std::nullopt;
  if (!std::equal(kMagic.begin(), kMagic.end(), buf.begin())) return std::nullopt;

  const std::size_t body = buf.size() - sizeof(std::uint64_t);
  std::uint64_t stored = 0;
  std::memcpy(&stored, buf.data() + body, sizeof(stored));
  if (stored != fnv1a(buf.substr(0, body))) return std::nullopt;

  std::size_t pos = kMagic.size();
  std::uint64_t n_lat = 0, n_lon = 0, n_basis = 0, n_eig = 0;
  std::uint32_t var = 0;
  if (!get(buf, pos, n_lat) || !get(buf, pos, n_lon) || !get(buf, pos, var) ||
      !get(buf, pos, n_basis) || !get(buf, pos, n_eig)) {
    return std::nullopt;
  }
  if (n_lat != grid->n_lat() || n_lon != grid->n_lon() ||
      var != static_cast<std::uint32_t>(variant)) {
    return std::nullopt;
  }
  const std::size_t n = grid->n_grid();
  if (n_basis > n || n_eig > n_basis) return std::nullopt;
  if (pos + sizeof(double) * (n_eig + n * n_basis) != body) return std::nullopt;

  BasisSet b;
  b.grid = grid;
  b.kind = BasisKind::Laplacian;
  b.eigenvalues.resize(static_cast<Eigen::Index>(n_eig));
  std::memcpy(b.eigenvalues.data(), buf.data() + pos, sizeof(double) * n_eig);
  pos += sizeof(double) * n_eig;
  b.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_basis));
  std::memcpy(b.vectors.data(), buf.data() + pos, sizeof(double) * n * n_basis);
  return b;
}

}  // namespace bofp::io
