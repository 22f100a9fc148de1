#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mmarket/harness.hpp"

namespace mmarket {
namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_bool(bool v) { return v ? "true" : "false"; }

// One field of a record: its column name, CSV text and JSON text.
struct Field {
  const char* name;
  std::string csv;
  std::string json;
};

Field num(const char* name, std::int64_t v) { return {name, std::to_string(v), std::to_string(v)}; }
Field unum(const char* name, std::uint64_t v) { return {name, std::to_string(v), std::to_string(v)}; }
Field real(const char* name, double v) { return {name, fmt_double(v), fmt_double(v)}; }
Field flag(const char* name, bool v) { return {name, fmt_bool(v), fmt_bool(v)}; }

Field opt_real(const char* name, const std::optional<double>& v) {
  return v ? real(name, *v) : Field{name, "", "null"};
}
Field opt_flag(const char* name, const std::optional<bool>& v) {
  return v ? flag(name, *v) : Field{name, "", "null"};
}
Field opt_num(const char* name, const std::optional<std::int64_t>& v) {
  return v ? num(name, *v) : Field{name, "", "null"};
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<Field> fields_of(const TrialRecord& r, bool include_timing) {
  std::vector<Field> f{
      num("cell", static_cast<std::int64_t>(r.cell)),
      num("trial", r.trial),
      num("n", r.n),
      num("k", r.k),
      real("phi_m", r.phi_m),
      real("phi_w", r.phi_w),
      unum("seed", r.seed),
      num("delta_rm", r.delta_rm),
      num("delta_rw", r.delta_rw),
      num("max_disp_men", r.max_disp_men),
      num("max_disp_women", r.max_disp_women),
      opt_real("threshold_men", r.threshold_men),
      opt_real("threshold_women", r.threshold_women),
      opt_flag("localization_event", r.localization_event),
      num("max_mutual_gap", r.max_mutual_gap),
      num("max_central_gap", r.max_central_gap),
      opt_real("max_quantile_gap", r.max_quantile_gap),
      real("am_mu_m", r.am_mu_m),
      real("am_mu_w", r.am_mu_w),
      real("aw_mu_m", r.aw_mu_m),
      real("aw_mu_w", r.aw_mu_w),
      real("ratio_men", r.ratio_men),
      real("ratio_women", r.ratio_women),
      real("max_aw_over_am", r.max_aw_over_am),
      real("max_am_over_aw", r.max_am_over_aw),
      num("holzman_bound", r.holzman_bound),
      flag("holzman_ok", r.holzman_ok),
      opt_num("stable_count", r.stable_count),
      flag("truncated", r.truncated),
      Field{"error", csv_quote(r.error), json(r.error).dump()},
  };
  if (include_timing) f.push_back(real("wall_seconds", r.wall_seconds));
  return f;
}

// Splits one CSV line honoring double-quoted fields.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

// Fills a record from name -> json value pairs (CSV cells are converted first).
TrialRecord record_from_json(const json& j) {
  auto opt_d = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  TrialRecord r;
  r.cell = j.at("cell").get<std::size_t>();
  r.trial = j.at("trial").get<int>();
  r.n = j.at("n").get<int>();
  r.k = j.at("k").get<int>();
  r.phi_m = j.at("phi_m").get<double>();
  r.phi_w = j.at("phi_w").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.delta_rm = j.at("delta_rm").get<int>();
  r.delta_rw = j.at("delta_rw").get<int>();
  r.max_disp_men = j.at("max_disp_men").get<int>();
  r.max_disp_women = j.at("max_disp_women").get<int>();
  r.threshold_men = opt_d("threshold_men");
  r.threshold_women = opt_d("threshold_women");
  if (j.contains("localization_event") && !j.at("localization_event").is_null()) {
    r.localization_event = j.at("localization_event").get<bool>();
  }
  r.max_mutual_gap = j.at("max_mutual_gap").get<int>();
  r.max_central_gap = j.at("max_central_gap").get<int>();
  r.max_quantile_gap = opt_d("max_quantile_gap");
  r.am_mu_m = j.at("am_mu_m").get<double>();
  r.am_mu_w = j.at("am_mu_w").get<double>();
  r.aw_mu_m = j.at("aw_mu_m").get<double>();
  r.aw_mu_w = j.at("aw_mu_w").get<double>();
  r.ratio_men = j.at("ratio_men").get<double>();
  r.ratio_women = j.at("ratio_women").get<double>();
  r.max_aw_over_am = j.at("max_aw_over_am").get<double>();
  r.max_am_over_aw = j.at("max_am_over_aw").get<double>();
  r.holzman_bound = j.at("holzman_bound").get<int>();
  r.holzman_ok = j.at("holzman_ok").get<bool>();
  if (j.contains("stable_count") && !j.at("stable_count").is_null()) {
    r.stable_count = j.at("stable_count").get<std::int64_t>();
  }
  r.truncated = j.at("truncated").get<bool>();
  r.error = j.value("error", std::string{});
  if (j.contains("wall_seconds")) r.wall_seconds = j.at("wall_seconds").get<double>();
  return r;
}

json csv_cell_to_json(const std::string& name, const std::string& cell) {
  if (name == "error") return cell;
  if (cell.empty()) return nullptr;
  if (cell == "true") return true;
  if (cell == "false") return false;
  return json::parse(cell);
}

}  // namespace

std::vector<std::string> csv_columns(bool include_timing) {
  std::vector<std::string> out;
  for (const auto& f : fields_of(TrialRecord{}, include_timing)) out.emplace_back(f.name);
  return out;
}

void emit(const std::vector<TrialRecord>& records, RecordFormat format, std::ostream& out,
          bool include_timing) {
  if (format == RecordFormat::Csv) {
    const auto cols = csv_columns(include_timing);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : records) {
      const auto fields = fields_of(r, include_timing);
      for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].csv;
      out << '\n';
    }
  } else {
    for (const auto& r : records) {
      const auto fields = fields_of(r, include_timing);
      out << '{';
      for (std::size_t i = 0; i < fields.size(); ++i) {
        out << (i ? "," : "") << '"' << fields[i].name << "\":" << fields[i].json;
      }
      out << "}\n";
    }
  }
  if (!out) throw std::runtime_error("failed to write records");
}

std::vector<TrialRecord> parse_records(std::string_view text) {
  std::vector<TrialRecord> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  try {
    if (text[first] == '{') {
      while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(record_from_json(json::parse(line)));
      }
    } else {
      std::getline(in, line);
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto header = split_csv(line);
      while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) throw std::runtime_error("column count mismatch");
        json j = json::object();
        for (std::size_t i = 0; i < header.size(); ++i) j[header[i]] = csv_cell_to_json(header[i], cells[i]);
        out.push_back(record_from_json(j));
      }
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("malformed records at line " + std::to_string(line_no) + ": " + e.what());
  }
  return out;
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out) {
  out << "cell,n,k,phi_m,phi_w,trials,median_max_quantile_gap,p90_max_quantile_gap,"
         "median_central_gap_over_log_n,max_central_gap_over_log_n\n";
  for (const auto& r : rows) {
    out << r.cell.index << ',' << r.cell.n << ',' << r.cell.k << ',' << fmt_double(r.cell.phi_m) << ','
        << fmt_double(r.cell.phi_w) << ',' << r.trials << ',' << fmt_double(r.median_max_quantile_gap)
        << ',' << fmt_double(r.p90_max_quantile_gap) << ',' << fmt_double(r.median_central_gap_over_log_n)
        << ',' << fmt_double(r.max_central_gap_over_log_n) << '\n';
  }
}

void write_welfare_csv(const std::vector<WelfareRow>& rows, std::ostream& out) {
  out << "cell,n,k,phi_m,phi_w,trials,mean_am_mu_m,mean_am_mu_w,mean_aw_mu_m,mean_aw_mu_w,"
         "mean_ratio_men,mean_ratio_women,mean_aw_over_am_mu_m,mean_aw_over_am_mu_w,"
         "mean_max_aw_over_am,mean_max_am_over_aw,log_n,n_over_log_n\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt_double(*v) : std::string{}; };
  for (const auto& r : rows) {
    out << r.cell.index << ',' << r.cell.n << ',' << r.cell.k << ',' << fmt_double(r.cell.phi_m) << ','
        << fmt_double(r.cell.phi_w) << ',' << r.trials << ',' << fmt_double(r.mean_am_mu_m) << ','
        << fmt_double(r.mean_am_mu_w) << ',' << fmt_double(r.mean_aw_mu_m) << ','
        << fmt_double(r.mean_aw_mu_w) << ',' << fmt_double(r.mean_ratio_men) << ','
        << fmt_double(r.mean_ratio_women) << ',' << fmt_double(r.mean_aw_over_am_mu_m) << ','
        << fmt_double(r.mean_aw_over_am_mu_w) << ',' << fmt_double(r.mean_max_aw_over_am) << ','
        << fmt_double(r.mean_max_am_over_aw) << ',' << opt(r.log_n) << ',' << opt(r.n_over_log_n) << '\n';
  }
}

}  // namespace mmarket
