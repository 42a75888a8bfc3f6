#include "ebshrink/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ebshrink/errors.hpp"
#include "ebshrink/math.hpp"

namespace ebshrink {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_number(const std::string& file, std::size_t lineno,
                    const std::string& field, const std::string& name) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || field.empty()) {
    throw ParseError(file, lineno, name + ": not a number: '" + field + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(file, lineno, name + ": must be finite");
  }
  return value;
}

// Reads all data lines of a CSV file after checking the header against one
// of the accepted variants. Returns (header index, lines with line numbers).
struct CsvBody {
  std::size_t header_variant = 0;
  std::vector<std::pair<std::size_t, std::string>> rows;
};

CsvBody read_csv(const std::filesystem::path& path,
                 std::span<const std::string> accepted_headers) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open file: " + path.string());

  CsvBody body;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      bool matched = false;
      for (std::size_t i = 0; i < accepted_headers.size(); ++i) {
        if (line == accepted_headers[i]) {
          body.header_variant = i;
          matched = true;
          break;
        }
      }
      if (!matched) {
        throw ParseError(path.string(), lineno,
                         "malformed header: '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    body.rows.emplace_back(lineno, line);
  }
  if (!header_seen) {
    throw ParseError(path.string(), 1, "missing header");
  }
  return body;
}

}  // namespace

std::vector<ExperimentSummary> parse_experiments(
    const std::filesystem::path& path) {
  const std::string with_sel = "id,theta_hat,sigma_hat,selected";
  const std::string without_sel = "id,theta_hat,sigma_hat";
  const std::string headers[] = {with_sel, without_sel};
  const CsvBody body = read_csv(path, headers);
  const bool has_selected = body.header_variant == 0;
  const std::size_t want = has_selected ? 4 : 3;

  std::vector<ExperimentSummary> out;
  out.reserve(body.rows.size());
  for (const auto& [lineno, line] : body.rows) {
    const auto fields = split_fields(line);
    if (fields.size() != want) {
      throw ParseError(path.string(), lineno,
                       "expected " + std::to_string(want) + " fields, got " +
                           std::to_string(fields.size()));
    }
    ExperimentSummary exp;
    exp.id = fields[0];
    if (exp.id.empty()) {
      throw ParseError(path.string(), lineno, "id must be non-empty");
    }
    exp.theta_hat = parse_number(path.string(), lineno, fields[1], "theta_hat");
    exp.sigma_hat = parse_number(path.string(), lineno, fields[2], "sigma_hat");
    if (has_selected && !fields[3].empty()) {
      if (fields[3] == "true" || fields[3] == "1") {
        exp.selected = true;
      } else if (fields[3] == "false" || fields[3] == "0") {
        exp.selected = false;
      } else {
        throw ParseError(path.string(), lineno,
                         "selected: expected true/false/1/0/empty, got '" +
                             fields[3] + "'");
      }
    }
    try {
      exp.validate();
    } catch (const InvalidInput& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
    out.push_back(std::move(exp));
  }
  return out;
}

void write_experiments(std::ostream& out,
                       std::span<const ExperimentSummary> exps) {
  bool any_selected = false;
  for (const ExperimentSummary& e : exps) {
    if (e.selected.has_value()) {
      any_selected = true;
      break;
    }
  }
  out << (any_selected ? "id,theta_hat,sigma_hat,selected"
                       : "id,theta_hat,sigma_hat")
      << '\n';
  for (const ExperimentSummary& e : exps) {
    out << e.id << ',' << format_double(e.theta_hat) << ','
        << format_double(e.sigma_hat);
    if (any_selected) {
      out << ',';
      if (e.selected.has_value()) out << (*e.selected ? "true" : "false");
    }
    out << '\n';
  }
}

void write_experiments(const std::filesystem::path& path,
                       std::span<const ExperimentSummary> exps) {
  std::ofstream out(path);
  if (!out) throw NotFoundError("cannot open file for write: " + path.string());
  write_experiments(out, exps);
}

std::vector<CuratedObservation> parse_curated(
    const std::filesystem::path& path) {
  const std::string headers[] = {std::string("id,eta_hat,gamma")};
  const CsvBody body = read_csv(path, headers);

  std::vector<CuratedObservation> out;
  out.reserve(body.rows.size());
  for (const auto& [lineno, line] : body.rows) {
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw ParseError(path.string(), lineno,
                       "expected 3 fields, got " + std::to_string(fields.size()));
    }
    CuratedObservation obs;
    obs.eta_hat = parse_number(path.string(), lineno, fields[1], "eta_hat");
    obs.gamma = parse_number(path.string(), lineno, fields[2], "gamma");
    try {
      obs.validate();
    } catch (const InvalidInput& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
    out.push_back(obs);
  }
  return out;
}

std::vector<ReplicationPair> parse_pairs(const std::filesystem::path& path) {
  const std::string headers[] = {
      std::string("id,theta_hat,sigma_hat,rep_theta_hat,rep_sigma_hat")};
  const CsvBody body = read_csv(path, headers);

  std::vector<ReplicationPair> out;
  out.reserve(body.rows.size());
  for (const auto& [lineno, line] : body.rows) {
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw ParseError(path.string(), lineno,
                       "expected 5 fields, got " + std::to_string(fields.size()));
    }
    ReplicationPair pair;
    pair.original.id = fields[0];
    pair.original.theta_hat =
        parse_number(path.string(), lineno, fields[1], "theta_hat");
    pair.original.sigma_hat =
        parse_number(path.string(), lineno, fields[2], "sigma_hat");
    pair.replication.id = fields[0];
    pair.replication.theta_hat =
        parse_number(path.string(), lineno, fields[3], "rep_theta_hat");
    pair.replication.sigma_hat =
        parse_number(path.string(), lineno, fields[4], "rep_sigma_hat");
    try {
      pair.original.validate();
      pair.replication.validate();
    } catch (const InvalidInput& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
    out.push_back(std::move(pair));
  }
  return out;
}

const char* const kPosteriorTableHeader =
    "id,estimator,mean,variance,lambda_used,interval_lo,interval_hi";

void write_posterior_table(std::ostream& out,
                           std::span<const PosteriorRow> rows) {
  out << kPosteriorTableHeader << '\n';
  for (const PosteriorRow& r : rows) {
    out << r.id << ',' << to_string(r.estimator) << ',' << format_double(r.mean)
        << ',' << format_double(r.variance) << ',';
    if (r.lambda_used) out << format_double(*r.lambda_used);
    out << ',' << format_double(r.interval_lo) << ','
        << format_double(r.interval_hi) << '\n';
  }
}

std::vector<PosteriorRow> parse_posterior_table(
    const std::filesystem::path& path) {
  const std::string headers[] = {std::string(kPosteriorTableHeader)};
  const CsvBody body = read_csv(path, headers);

  std::vector<PosteriorRow> out;
  out.reserve(body.rows.size());
  for (const auto& [lineno, line] : body.rows) {
    const auto fields = split_fields(line);
    if (fields.size() != 7) {
      throw ParseError(path.string(), lineno,
                       "expected 7 fields, got " + std::to_string(fields.size()));
    }
    PosteriorRow row;
    row.id = fields[0];
    try {
      row.estimator = estimator_from_string(fields[1]);
    } catch (const ConfigError& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
    row.mean = parse_number(path.string(), lineno, fields[2], "mean");
    row.variance = parse_number(path.string(), lineno, fields[3], "variance");
    if (!fields[4].empty()) {
      row.lambda_used =
          parse_number(path.string(), lineno, fields[4], "lambda_used");
    }
    row.interval_lo =
        parse_number(path.string(), lineno, fields[5], "interval_lo");
    row.interval_hi =
        parse_number(path.string(), lineno, fields[6], "interval_hi");
    if (!(row.variance > 0.0)) {
      throw ParseError(path.string(), lineno, "variance must be > 0");
    }
    out.push_back(std::move(row));
  }
  return out;
}

void write_metrics_table(std::ostream& out,
                         std::span<const MetricsReport> reports) {
  out << "estimator,mse,bias,coverage,n_selected,selection_rate\n";
  for (const MetricsReport& rep : reports) {
    out << to_string(rep.estimator) << ',' << format_double(rep.mse) << ','
        << format_double(rep.bias) << ',' << format_double(rep.coverage) << ','
        << rep.n_selected << ',' << format_double(rep.selection_rate) << '\n';
  }
}

void write_sweep_table(std::ostream& out, std::span<const SweepRow> rows) {
  out << "axis,axis_value,seed,estimator,mse,bias,coverage,n_selected,"
         "selection_rate\n";
  for (const SweepRow& row : rows) {
    const MetricsReport& rep = row.metrics;
    out << to_string(row.axis) << ',' << format_double(row.axis_value) << ','
        << row.seed << ',' << to_string(rep.estimator) << ','
        << format_double(rep.mse) << ',' << format_double(rep.bias) << ','
        << format_double(rep.coverage) << ',' << rep.n_selected << ','
        << format_double(rep.selection_rate) << '\n';
  }
}

}  // namespace ebshrink
