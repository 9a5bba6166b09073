#include "specfile.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace waveops {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw SpecError("spec line " + std::to_string(lineno) +
                        ": expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw SpecError("spec line " + std::to_string(lineno) + ": empty key");
      }
      if (!entries_.emplace(key, value).second) {
        throw SpecError("spec: duplicate key '" + key + "'");
      }
    }
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    std::string v = it->second;
    entries_.erase(it);
    return v;
  }

  std::string require(const std::string& key) {
    auto v = take(key);
    if (!v) throw SpecError("spec: missing required key '" + key + "'");
    return *v;
  }

  void reject_leftovers() const {
    if (entries_.empty()) return;
    std::string keys;
    for (const auto& [k, v] : entries_) {
      if (!keys.empty()) keys += ", ";
      keys += "'" + k + "'";
    }
    throw SpecError("spec: unknown key(s): " + keys);
  }

 private:
  std::map<std::string, std::string> entries_;
};

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw SpecError("spec: key '" + key + "': not a number: '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw SpecError("spec: key '" + key + "': not an integer: '" + v + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  const std::int64_t x = parse_int(key, v);
  if (x < 0) throw SpecError("spec: key '" + key + "' must be >= 0");
  return static_cast<std::uint64_t>(x);
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& v,
                          F&& one) {
  std::vector<T> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      throw SpecError("spec: key '" + key + "': empty list element");
    }
    out.push_back(one(key, item));
  }
  return out;
}

}  // namespace

const char* to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::uniform:
      return "uniform";
    case MeasureKind::cantor:
      return "cantor";
    case MeasureKind::riesz:
      return "riesz";
    case MeasureKind::file:
      return "file";
  }
  return "?";
}

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::rank_two:
      return "rank_two";
    case OperatorKind::counterexample:
      return "counterexample";
    case OperatorKind::random_kernel:
      return "random_kernel";
    case OperatorKind::kernel_file:
      return "kernel_file";
  }
  return "?";
}

const char* to_string(SymmetryClass s) {
  switch (s) {
    case SymmetryClass::antisymmetric:
      return "antisymmetric";
    case SymmetryClass::symmetric:
      return "symmetric";
    case SymmetryClass::none:
      return "none";
  }
  return "?";
}

ExperimentSpec parse_experiment_spec_text(const std::string& text) {
  KeyValues kv(text);
  ExperimentSpec spec;
  spec.raw_text = text;

  // measure
  const std::string mk = kv.require("measure.kind");
  if (mk == "uniform") {
    spec.measure.kind = MeasureKind::uniform;
    spec.measure.m = parse_uint("measure.m", kv.require("measure.m"));
    if (spec.measure.m == 0) throw SpecError("spec: measure.m must be >= 1");
  } else if (mk == "cantor") {
    spec.measure.kind = MeasureKind::cantor;
    spec.measure.level = static_cast<int>(
        parse_int("measure.level", kv.require("measure.level")));
  } else if (mk == "riesz") {
    spec.measure.kind = MeasureKind::riesz;
    spec.measure.coeffs = parse_list<double>(
        "measure.coeffs", kv.require("measure.coeffs"), parse_double);
    spec.measure.freqs = parse_list<std::int64_t>(
        "measure.freqs", kv.require("measure.freqs"), parse_int);
    spec.measure.grid = parse_uint("measure.grid", kv.require("measure.grid"));
  } else if (mk == "file") {
    spec.measure.kind = MeasureKind::file;
    spec.measure.path = kv.require("measure.path");
  } else {
    throw SpecError("spec: measure.kind must be uniform|cantor|riesz|file, "
                    "got '" + mk + "'");
  }

  // operator
  const std::string ok = kv.require("operator.kind");
  if (ok == "rank_two") {
    spec.op.kind = OperatorKind::rank_two;
  } else if (ok == "counterexample") {
    spec.op.kind = OperatorKind::counterexample;
  } else if (ok == "random_kernel") {
    spec.op.kind = OperatorKind::random_kernel;
  } else if (ok == "kernel_file") {
    spec.op.kind = OperatorKind::kernel_file;
  } else {
    throw SpecError(
        "spec: operator.kind must be "
        "rank_two|counterexample|random_kernel|kernel_file, got '" +
        ok + "'");
  }
  if (auto sym = kv.take("operator.symmetry")) {
    spec.op.symmetry_given = true;
    if (*sym == "antisymmetric") {
      spec.op.symmetry = SymmetryClass::antisymmetric;
    } else if (*sym == "symmetric") {
      spec.op.symmetry = SymmetryClass::symmetric;
    } else if (*sym == "none") {
      spec.op.symmetry = SymmetryClass::none;
    } else {
      throw SpecError(
          "spec: operator.symmetry must be antisymmetric|symmetric|none");
    }
  } else {
    // defaults by construction: rank-two pieces satisfy the antisymmetric
    // condition (with their gamma); the counterexample kernel is symmetric
    switch (spec.op.kind) {
      case OperatorKind::rank_two:
        spec.op.symmetry = SymmetryClass::antisymmetric;
        break;
      case OperatorKind::counterexample:
        spec.op.symmetry = SymmetryClass::symmetric;
        break;
      default:
        spec.op.symmetry = SymmetryClass::none;
        break;
    }
  }
  if (auto seed = kv.take("operator.seed")) {
    spec.op.seed = parse_uint("operator.seed", *seed);
  }
  if (spec.op.kind == OperatorKind::rank_two) {
    if (auto style = kv.take("operator.style")) {
      if (*style == "random") {
        spec.op.style = RankTwoStyle::random;
      } else if (*style == "monomial") {
        spec.op.style = RankTwoStyle::monomial;
      } else {
        throw SpecError("spec: operator.style must be random|monomial");
      }
    }
    if (spec.op.style == RankTwoStyle::monomial) {
      spec.op.p1 = parse_int("operator.p1", kv.require("operator.p1"));
      spec.op.p2 = parse_int("operator.p2", kv.require("operator.p2"));
      spec.op.q = parse_int("operator.q", kv.require("operator.q"));
    }
  }
  if (spec.op.kind == OperatorKind::kernel_file) {
    spec.op.path = kv.require("operator.path");
  }
  const bool randomized =
      spec.op.kind == OperatorKind::random_kernel ||
      (spec.op.kind == OperatorKind::rank_two &&
       spec.op.style == RankTwoStyle::random);
  if (randomized && !spec.op.seed) {
    throw SpecError(
        "spec: operator.seed is required when the operator is randomized");
  }

  // vectors
  if (auto fam = kv.take("vectors.family")) {
    if (*fam == "monomial") {
      spec.vectors.monomial = true;
    } else if (*fam == "file") {
      spec.vectors.monomial = false;
      spec.vectors.path = kv.require("vectors.path");
    } else {
      throw SpecError("spec: vectors.family must be monomial|file");
    }
  }
  if (spec.vectors.monomial) {
    if (auto v = kv.take("vectors.k_min")) {
      spec.vectors.k_min = parse_int("vectors.k_min", *v);
    }
    if (auto v = kv.take("vectors.k_max")) {
      spec.vectors.k_max = parse_int("vectors.k_max", *v);
    }
    if (spec.vectors.k_min > spec.vectors.k_max) {
      throw SpecError("spec: vectors.k_min > vectors.k_max");
    }
  }

  // grid, tolerances, output
  if (auto grid = kv.take("n_grid")) {
    spec.n_grid = parse_list<std::int64_t>("n_grid", *grid, parse_int);
    for (std::size_t i = 0; i < spec.n_grid.size(); ++i) {
      if (spec.n_grid[i] < 1) throw SpecError("spec: n_grid entries must be >= 1");
      if (i > 0 && spec.n_grid[i] <= spec.n_grid[i - 1]) {
        throw SpecError("spec: n_grid must be strictly increasing");
      }
    }
  }
  if (auto t = kv.take("tolerances.identity")) {
    spec.tol.identity = parse_double("tolerances.identity", *t);
    if (!(spec.tol.identity > 0)) {
      throw SpecError("spec: tolerances.identity must be > 0");
    }
  }
  if (auto t = kv.take("tolerances.condition")) {
    spec.tol.condition = parse_double("tolerances.condition", *t);
    if (!(spec.tol.condition > 0)) {
      throw SpecError("spec: tolerances.condition must be > 0");
    }
  }
  if (auto out = kv.take("output_dir")) spec.output_dir = *out;
  if (auto nmax = kv.take("fourier.n_max")) {
    spec.fourier_n_max = parse_int("fourier.n_max", *nmax);
    if (*spec.fourier_n_max < 1) {
      throw SpecError("spec: fourier.n_max must be >= 1");
    }
  }

  kv.reject_leftovers();
  return spec;
}

ExperimentSpec parse_experiment_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec_text(buf.str());
}

void require_n_grid(const ExperimentSpec& spec) {
  if (spec.n_grid.empty()) {
    throw SpecError("spec: n_grid is required and must be non-empty");
  }
}

}  // namespace waveops
