#include "stosched/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "stosched/random.hpp"

namespace stosched {

TypeParams::TypeParams(std::vector<double> lambdas, std::size_t jobs_per_type)
    : lambdas_(std::move(lambdas)), n_(jobs_per_type) {
  if (lambdas_.empty()) throw ParameterError("TypeParams: at least one job type is required");
  if (n_ == 0) throw ParameterError("TypeParams: jobs per type must be positive");
  for (double l : lambdas_) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw ParameterError("TypeParams: every expected size must be positive and finite");
    }
  }
}

std::vector<double> TypeParams::sorted_lambdas() const {
  std::vector<double> out = lambdas_;
  std::sort(out.begin(), out.end());
  return out;
}

double TypeParams::lambda_sum() const {
  return std::accumulate(lambdas_.begin(), lambdas_.end(), 0.0);
}

Instance::Instance(TypeParams params, std::uint64_t seed, std::vector<double> sizes)
    : params_(std::move(params)), seed_(seed), sizes_(std::move(sizes)) {
  if (sizes_.size() != params_.num_jobs()) {
    throw ParameterError("Instance: size matrix does not match n x K");
  }
  for (double s : sizes_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ParameterError("Instance: job sizes must be positive and finite");
    }
  }
}

std::vector<double> Instance::column(TypeIndex k) const {
  std::vector<double> out(n());
  for (JobIndex i = 0; i < n(); ++i) out[i] = size(i, k);
  return out;
}

double Instance::total_work() const {
  return std::accumulate(sizes_.begin(), sizes_.end(), 0.0);
}

Instance Instance::scaled(double factor) const {
  if (!(factor > 0.0)) throw ParameterError("Instance::scaled: factor must be positive");
  std::vector<double> lambdas = params_.lambdas();
  for (double& l : lambdas) l *= factor;
  std::vector<double> sizes = sizes_;
  for (double& s : sizes) s *= factor;
  return Instance(TypeParams(std::move(lambdas), n()), seed_, std::move(sizes));
}

Instance sample_instance(const TypeParams& params, std::uint64_t seed) {
  const Philox4x32 gen(seed);
  const std::size_t K = params.num_types();
  std::vector<double> sizes(params.num_jobs());
  for (JobIndex i = 0; i < params.n(); ++i) {
    for (TypeIndex k = 0; k < K; ++k) {
      const double u = gen.uniform(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k));
      sizes[i * K + k] = params.lambda(k) * -std::log(u);
    }
  }
  return Instance(params, seed, std::move(sizes));
}

std::string generator_id() {
  return std::string(Philox4x32::kName) + "/v" + std::to_string(Philox4x32::kVersion);
}

namespace {

std::string format_exact(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParameterError("instance csv: cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

void write_instance_csv(std::ostream& out, const Instance& instance) {
  const std::size_t K = instance.num_types();
  out << "# generator=" << generator_id() << '\n';
  out << "# seed=" << instance.seed() << '\n';
  out << "# lambdas=";
  for (TypeIndex k = 0; k < K; ++k) {
    out << (k ? "," : "") << format_exact(instance.params().lambda(k));
  }
  out << '\n';
  for (TypeIndex k = 0; k < K; ++k) out << (k ? "," : "") << "type_" << (k + 1);
  out << '\n';
  for (JobIndex i = 0; i < instance.n(); ++i) {
    for (TypeIndex k = 0; k < K; ++k) out << (k ? "," : "") << format_exact(instance.size(i, k));
    out << '\n';
  }
}

Instance read_instance_csv(std::istream& in) {
  std::uint64_t seed = 0;
  std::vector<double> lambdas;
  std::vector<double> sizes;
  std::size_t K = 0;
  bool header_seen = false;
  std::size_t rows = 0;

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body(line);
      body.remove_prefix(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      if (body.starts_with("seed=")) {
        body.remove_prefix(5);
        auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), seed);
        if (ec != std::errc()) throw ParameterError("instance csv: bad seed line");
      } else if (body.starts_with("lambdas=")) {
        body.remove_prefix(8);
        lambdas.clear();
        for (auto field : split(body, ',')) lambdas.push_back(parse_double(field));
      }
      continue;
    }
    const auto fields = split(line, ',');
    if (!header_seen) {
      K = fields.size();
      for (std::size_t k = 0; k < K; ++k) {
        if (fields[k] != "type_" + std::to_string(k + 1)) {
          throw ParameterError("instance csv: header must be type_1..type_K");
        }
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != K) throw ParameterError("instance csv: ragged row");
    for (auto field : fields) sizes.push_back(parse_double(field));
    ++rows;
  }
  if (!header_seen || rows == 0) throw ParameterError("instance csv: no data rows");
  if (lambdas.size() != K) throw ParameterError("instance csv: '# lambdas=' missing or wrong length");
  return Instance(TypeParams(std::move(lambdas), rows), seed, std::move(sizes));
}

}  // namespace stosched
