#include "measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "phase.hpp"
#include "rng.hpp"

namespace waveops {

namespace {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms, std::string label,
                                 bool normalize)
    : atoms_(std::move(atoms)), label_(std::move(label)) {
  if (atoms_.empty()) {
    throw std::invalid_argument("measure: at least one atom required");
  }
  for (const Atom& a : atoms_) {
    if (!(a.theta >= 0.0 && a.theta < 1.0)) {
      throw std::invalid_argument("measure: theta outside [0,1)");
    }
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw std::invalid_argument("measure: weights must be positive");
    }
  }
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.theta < b.theta; });
  for (std::size_t j = 1; j < atoms_.size(); ++j) {
    if (atoms_[j].theta == atoms_[j - 1].theta) {
      throw std::invalid_argument("measure: duplicate atom");
    }
  }

  CompensatedSum mass;
  for (const Atom& a : atoms_) mass.add(a.weight);
  total_mass_ = mass.value();
  if (normalize) {
    for (Atom& a : atoms_) a.weight /= total_mass_;
    CompensatedSum renorm;
    for (const Atom& a : atoms_) renorm.add(a.weight);
    total_mass_ = renorm.value();
  }

  const std::size_t m = atoms_.size();
  if (m == 1) {
    min_gap_ = 1.0;
    min_gap_phase_ = 2.0;
  } else {
    double g = 1.0 - atoms_.back().theta + atoms_.front().theta;  // wrap
    for (std::size_t j = 1; j < m; ++j) {
      g = std::min(g, atoms_[j].theta - atoms_[j - 1].theta);
    }
    min_gap_ = g;
    min_gap_phase_ = 2.0 * std::sin(M_PI * std::min(g, 0.5));
  }
  // ten recurrence periods of the slowest atom pair
  horizon_ = static_cast<std::int64_t>(std::ceil(10.0 / min_gap_));

  sqrt_weights_.reserve(m);
  points_.reserve(m);
  for (const Atom& a : atoms_) {
    sqrt_weights_.push_back(std::sqrt(a.weight));
    // same reduction path as every other power of the atom
    points_.push_back(unit_power(a.theta, 1));
  }
}

void DiscreteMeasure::save(std::ostream& out) const {
  out << "# waveops-measure v1 label=" << label_ << "\n";
  for (const Atom& a : atoms_) {
    out << format_g17(a.theta) << "\t" << format_g17(a.weight) << "\n";
  }
}

std::string DiscreteMeasure::serialized() const {
  std::ostringstream os;
  save(os);
  return os.str();
}

std::string DiscreteMeasure::fingerprint() const {
  return fnv1a64_hex(serialized());
}

MeasurePtr make_from_atoms(std::vector<Atom> atoms, std::string label,
                           bool normalize) {
  return std::make_shared<DiscreteMeasure>(std::move(atoms), std::move(label),
                                           normalize);
}

MeasurePtr make_uniform(std::size_t m) {
  if (m == 0) throw std::invalid_argument("make_uniform: m must be >= 1");
  std::vector<Atom> atoms;
  atoms.reserve(m);
  const double w = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j) {
    atoms.push_back({static_cast<double>(j) / static_cast<double>(m), w});
  }
  return make_from_atoms(std::move(atoms), "uniform m=" + std::to_string(m));
}

MeasurePtr make_cantor(int level) {
  if (level < 1 || level > 20) {
    throw std::invalid_argument("make_cantor: level must be in [1, 20]");
  }
  // steps 2/3^k snapped to the 2^-53 grid: every subset sum is then an exact
  // double, so the direct Fourier sum matches the product factorization.
  std::vector<double> step(static_cast<std::size_t>(level));
  double pow3 = 1.0;
  for (int k = 0; k < level; ++k) {
    pow3 *= 3.0;
    step[static_cast<std::size_t>(k)] =
        std::ldexp(std::nearbyint(std::ldexp(2.0 / pow3, 53)), -53);
  }
  const std::size_t count = std::size_t{1} << level;
  const double w = std::ldexp(1.0, -level);
  std::vector<Atom> atoms;
  atoms.reserve(count);
  for (std::size_t bits = 0; bits < count; ++bits) {
    double theta = 0.0;
    for (int k = 0; k < level; ++k) {
      if (bits & (std::size_t{1} << (level - 1 - k))) {
        theta += step[static_cast<std::size_t>(k)];
      }
    }
    atoms.push_back({theta, w});
  }
  return make_from_atoms(std::move(atoms),
                         "cantor L=" + std::to_string(level));
}

MeasurePtr make_riesz(const std::vector<double>& coeffs,
                      const std::vector<std::int64_t>& freqs, std::size_t grid,
                      bool normalize) {
  if (grid == 0) throw std::invalid_argument("make_riesz: empty grid");
  if (coeffs.size() != freqs.size()) {
    throw std::invalid_argument("make_riesz: coeffs/freqs size mismatch");
  }
  for (double a : coeffs) {
    if (!(std::abs(a) < 1.0)) {
      throw std::invalid_argument(
          "make_riesz: |coefficient| >= 1 (density could vanish or go "
          "negative)");
    }
  }
  std::int64_t max_freq = 0;
  for (std::size_t q = 0; q < freqs.size(); ++q) {
    if (freqs[q] <= 0) {
      throw std::invalid_argument("make_riesz: frequencies must be positive");
    }
    if (q > 0 && freqs[q] < 3 * freqs[q - 1]) {
      throw std::invalid_argument(
          "make_riesz: frequencies must be lacunary (n_{q+1} >= 3 n_q)");
    }
    max_freq = std::max(max_freq, freqs[q]);
  }
  if (!freqs.empty() &&
      static_cast<std::int64_t>(grid) <= 2 * max_freq) {
    throw std::invalid_argument("make_riesz: grid must exceed 2*max(freqs)");
  }

  std::vector<Atom> atoms;
  atoms.reserve(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    const double theta =
        static_cast<double>(j) / static_cast<double>(grid);
    double density = 1.0;
    for (std::size_t q = 0; q < freqs.size(); ++q) {
      density *= 1.0 + coeffs[q] * unit_power(theta, freqs[q]).real();
    }
    atoms.push_back({theta, density / static_cast<double>(grid)});
  }
  std::ostringstream label;
  label << "riesz m=" << grid << " coeffs=";
  for (std::size_t q = 0; q < coeffs.size(); ++q) {
    label << (q ? "," : "") << coeffs[q];
  }
  label << " freqs=";
  for (std::size_t q = 0; q < freqs.size(); ++q) {
    label << (q ? "," : "") << freqs[q];
  }
  return std::make_shared<DiscreteMeasure>(std::move(atoms), label.str(),
                                           normalize);
}

MeasurePtr make_random(std::size_t m, std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("make_random: m must be >= 1");
  Rng rng(seed);
  std::vector<Atom> atoms;
  atoms.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double theta =
        (static_cast<double>(j) + 0.8 * rng.uniform()) / static_cast<double>(m);
    atoms.push_back({theta, 0.1 + rng.uniform()});
  }
  return make_from_atoms(std::move(atoms),
                         "random m=" + std::to_string(m) + " seed=" +
                             std::to_string(seed));
}

MeasurePtr load_measure(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("measure load: empty stream");
  }
  const std::string magic = "# waveops-measure v1 label=";
  if (header.rfind(magic, 0) != 0) {
    throw std::runtime_error("measure load: bad header");
  }
  std::string label = header.substr(magic.size());
  std::vector<Atom> atoms;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Atom a{};
    if (!(ls >> a.theta >> a.weight)) {
      throw std::runtime_error("measure load: bad atom line: " + line);
    }
    atoms.push_back(a);
  }
  return make_from_atoms(std::move(atoms), std::move(label),
                         /*normalize=*/false);
}

MeasurePtr load_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measure file: " + path);
  return load_measure(in);
}

void save_measure_file(const DiscreteMeasure& mu, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write measure file: " + path);
  mu.save(out);
}

std::complex<double> fourier_coefficient(const DiscreteMeasure& mu,
                                         std::int64_t n) {
  CompensatedComplexSum sum;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    sum.add(mu.weight(j) * unit_power(mu.theta(j), -n));
  }
  return sum.value();
}

std::complex<double> fourier_coefficient(
    const DiscreteMeasure& mu, std::int64_t n,
    std::span<const std::complex<double>> values) {
  if (values.size() != mu.size()) {
    throw std::invalid_argument(
        "fourier_coefficient: weight function does not match the measure");
  }
  CompensatedComplexSum sum;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    sum.add(mu.weight(j) * values[j] * unit_power(mu.theta(j), -n));
  }
  return sum.value();
}

double wiener_average(const DiscreteMeasure& mu, std::int64_t n_terms) {
  if (n_terms < 1) {
    throw std::invalid_argument("wiener_average: N must be >= 1");
  }
  CompensatedSum sum;
  for (std::int64_t n = 1; n <= n_terms; ++n) {
    sum.add(std::norm(fourier_coefficient(mu, n)));
  }
  return sum.value() / static_cast<double>(n_terms);
}

FourierProfile decay_profile(const DiscreteMeasure& mu, std::int64_t n_max) {
  if (n_max < 1) throw std::invalid_argument("decay_profile: N_max must be >= 1");
  FourierProfile profile;
  profile.values.reserve(static_cast<std::size_t>(n_max) + 1);
  profile.cesaro_abs.reserve(static_cast<std::size_t>(n_max) + 1);
  CompensatedSum abs_sum;
  for (std::int64_t n = 0; n <= n_max; ++n) {
    const std::complex<double> v = fourier_coefficient(mu, n);
    profile.values.push_back(v);
    abs_sum.add(std::abs(v));
    profile.cesaro_abs.push_back(abs_sum.value() /
                                 static_cast<double>(n + 1));
  }
  return profile;
}

void write_profile_csv(std::ostream& out, const FourierProfile& profile,
                       bool with_wiener) {
  out << "n,re,im,abs,cesaro_abs";
  if (with_wiener) out << ",wiener";
  out << "\n";
  CompensatedSum sq_sum;
  for (std::size_t n = 0; n < profile.values.size(); ++n) {
    const std::complex<double> v = profile.values[n];
    out << n << "," << format_g17(v.real()) << "," << format_g17(v.imag())
        << "," << format_g17(std::abs(v)) << ","
        << format_g17(profile.cesaro_abs[n]);
    if (with_wiener) {
      if (n == 0) {
        out << "," << format_g17(0.0);
      } else {
        sq_sum.add(std::norm(v));
        out << "," << format_g17(sq_sum.value() / static_cast<double>(n));
      }
    }
    out << "\n";
  }
}

std::uint64_t fnv1a64(std::span<const char> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(std::span<const char>(bytes.data(), bytes.size()))));
  return buf;
}

}  // namespace waveops
