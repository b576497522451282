#include "sis/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace sis {

namespace {

constexpr char kCsvHeader[] =
    "path_index,seed,extinct,t_stop,slope_endpoint,slope_regression,avg_i,"
    "avg_i2,psi,mart_state_over_t,mart_log_over_t,clamp_count";

std::string json_double(double v) {
    if (std::isnan(v)) return "null";
    return format_double(v);
}

const char* json_bool(bool b) { return b ? "true" : "false"; }

void emit_summary_json(const PathSummary& s, std::ostream& os) {
    os << "{\"path_index\":" << s.path_index
       << ",\"seed\":" << s.seed
       << ",\"extinct\":" << json_bool(s.extinct)
       << ",\"t_stop\":" << json_double(s.t_stop)
       << ",\"slope_endpoint\":" << json_double(s.slope_endpoint)
       << ",\"slope_regression\":" << json_double(s.slope_regression)
       << ",\"avg_i\":" << json_double(s.avg_i)
       << ",\"avg_i2\":" << json_double(s.avg_i2)
       << ",\"psi\":" << json_double(s.psi)
       << ",\"mart_state_over_t\":" << json_double(s.mart_state_over_t)
       << ",\"mart_log_over_t\":" << json_double(s.mart_log_over_t)
       << ",\"mart_term\":" << json_double(s.mart_term)
       << ",\"clamp_count\":" << s.clamp_count
       << ",\"n_steps\":" << s.n_steps
       << ",\"clamp_unreliable\":" << json_bool(s.clamp_unreliable)
       << ",\"hoelder_margin\":" << json_double(s.hoelder_margin)
       << ",\"min_hoelder_margin\":" << json_double(s.min_hoelder_margin)
       << ",\"max_identity_residual\":" << json_double(s.max_identity_residual)
       << ",\"decomp_residual\":" << json_double(s.decomp_residual) << "}";
}

void emit_regime_json(const RegimeReport& r, std::ostream& os) {
    os << "{\"r0s\":" << json_double(r.r0s)
       << ",\"cond_13i\":" << json_bool(r.cond_13i)
       << ",\"cond_13ii\":" << json_bool(r.cond_13ii)
       << ",\"conjecture_region\":" << json_bool(r.conjecture_region)
       << ",\"persistence\":" << json_bool(r.persistence)
       << ",\"theorem_case\":\"" << to_string(r.theorem_case) << "\""
       << ",\"rate_bound\":" << json_double(r.rate_bound)
       << ",\"average_bound\":" << json_double(r.average_bound)
       << ",\"deterministic\":" << json_bool(r.deterministic)
       << ",\"critical\":" << json_bool(r.critical) << "}";
}

void emit_report_csv(const EnsembleReport& rep, std::ostream& os) {
    os << kCsvHeader << "\n";
    for (const PathSummary& s : rep.per_path) {
        os << s.path_index << "," << s.seed << "," << (s.extinct ? 1 : 0) << ","
           << format_double(s.t_stop) << "," << format_double(s.slope_endpoint)
           << "," << format_double(s.slope_regression) << ","
           << format_double(s.avg_i) << "," << format_double(s.avg_i2) << ","
           << format_double(s.psi) << "," << format_double(s.mart_state_over_t)
           << "," << format_double(s.mart_log_over_t) << "," << s.clamp_count
           << "\n";
    }
    const RegimeReport& r = rep.regime;
    os << "#summary n_paths=" << rep.n_paths << "\n"
       << "#summary scheme=" << to_string(rep.scheme) << "\n"
       << "#summary extinct_fraction=" << format_double(rep.extinct_fraction) << "\n"
       << "#summary slope_mean=" << format_double(rep.slope_mean) << "\n"
       << "#summary slope_stderr=" << format_double(rep.slope_stderr) << "\n"
       << "#summary slope_q05=" << format_double(rep.slope_quantiles[0]) << "\n"
       << "#summary slope_q25=" << format_double(rep.slope_quantiles[1]) << "\n"
       << "#summary slope_q50=" << format_double(rep.slope_quantiles[2]) << "\n"
       << "#summary slope_q75=" << format_double(rep.slope_quantiles[3]) << "\n"
       << "#summary slope_q95=" << format_double(rep.slope_quantiles[4]) << "\n"
       << "#summary avg_i_mean=" << format_double(rep.avg_i_mean) << "\n"
       << "#summary mart_mean=" << format_double(rep.mart_mean) << "\n"
       << "#summary mart_stderr=" << format_double(rep.mart_stderr) << "\n"
       << "#summary max_identity_residual=" << format_double(rep.max_identity_residual)
       << "\n"
       << "#summary r0s=" << format_double(r.r0s) << "\n"
       << "#summary theorem_case=" << to_string(r.theorem_case) << "\n"
       << "#summary rate_bound=" << format_double(r.rate_bound) << "\n"
       << "#summary average_bound=" << format_double(r.average_bound) << "\n";
}

void emit_report_json(const EnsembleReport& rep, std::ostream& os) {
    os << "{\"regime\":";
    emit_regime_json(rep.regime, os);
    os << ",\"n_paths\":" << rep.n_paths
       << ",\"extinct_fraction\":" << json_double(rep.extinct_fraction)
       << ",\"slope_mean\":" << json_double(rep.slope_mean)
       << ",\"slope_stderr\":" << json_double(rep.slope_stderr)
       << ",\"slope_quantiles\":[";
    for (int k = 0; k < 5; ++k)
        os << (k ? "," : "") << json_double(rep.slope_quantiles[k]);
    os << "],\"avg_i_mean\":" << json_double(rep.avg_i_mean)
       << ",\"mart_mean\":" << json_double(rep.mart_mean)
       << ",\"mart_stderr\":" << json_double(rep.mart_stderr)
       << ",\"max_identity_residual\":" << json_double(rep.max_identity_residual)
       << ",\"per_path\":[";
    for (std::size_t k = 0; k < rep.per_path.size(); ++k) {
        if (k) os << ",";
        emit_summary_json(rep.per_path[k], os);
    }
    os << "]}\n";
}

void emit_path_csv(const PathRecord& rec, std::ostream& os) {
    os << "t,i,log_i,sum_i,sum_i2,mart_state,mart_log\n";
    for (const Sample& s : rec.samples) {
        os << format_double(s.t) << "," << format_double(s.i) << ","
           << format_double(s.log_i) << "," << format_double(s.sum_i) << ","
           << format_double(s.sum_i2) << "," << format_double(s.mart_state) << ","
           << format_double(s.mart_log) << "\n";
    }
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(rec.params_hash));
    os << "#summary params_hash=" << hash << "\n"
       << "#summary seed=" << rec.seed << "\n"
       << "#summary path_index=" << rec.path_index << "\n"
       << "#summary extinct=" << (rec.extinct ? 1 : 0) << "\n"
       << "#summary t_stop=" << format_double(rec.t_stop) << "\n"
       << "#summary n_steps=" << rec.n_steps << "\n"
       << "#summary clamp_count=" << rec.clamp_count << "\n"
       << "#summary slope_endpoint=" << format_double(rec.slope_endpoint) << "\n"
       << "#summary slope_regression=" << format_double(rec.slope_regression) << "\n"
       << "#summary avg_i=" << format_double(rec.avg_i) << "\n"
       << "#summary avg_i2=" << format_double(rec.avg_i2) << "\n"
       << "#summary psi=" << format_double(rec.psi) << "\n"
       << "#summary hoelder_margin=" << format_double(rec.hoelder_margin) << "\n";
}

void emit_path_json(const PathRecord& rec, std::ostream& os) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(rec.params_hash));
    auto series = [&os, &rec](const char* name, auto pick) {
        os << "\"" << name << "\":[";
        for (std::size_t k = 0; k < rec.samples.size(); ++k)
            os << (k ? "," : "") << json_double(pick(rec.samples[k]));
        os << "]";
    };
    os << "{";
    series("t", [](const Sample& s) { return s.t; });
    os << ",";
    series("i", [](const Sample& s) { return s.i; });
    os << ",";
    series("log_i", [](const Sample& s) { return s.log_i; });
    os << ",";
    series("sum_i", [](const Sample& s) { return s.sum_i; });
    os << ",";
    series("sum_i2", [](const Sample& s) { return s.sum_i2; });
    os << ",";
    series("mart_state", [](const Sample& s) { return s.mart_state; });
    os << ",";
    series("mart_log", [](const Sample& s) { return s.mart_log; });
    os << ",\"summary\":{\"params_hash\":\"" << hash << "\""
       << ",\"seed\":" << rec.seed
       << ",\"path_index\":" << rec.path_index
       << ",\"extinct\":" << json_bool(rec.extinct)
       << ",\"t_stop\":" << json_double(rec.t_stop)
       << ",\"n_steps\":" << rec.n_steps
       << ",\"clamp_count\":" << rec.clamp_count
       << ",\"slope_endpoint\":" << json_double(rec.slope_endpoint)
       << ",\"slope_regression\":" << json_double(rec.slope_regression)
       << ",\"avg_i\":" << json_double(rec.avg_i)
       << ",\"avg_i2\":" << json_double(rec.avg_i2)
       << ",\"psi\":" << json_double(rec.psi)
       << ",\"hoelder_margin\":" << json_double(rec.hoelder_margin) << "}}\n";
}

double node_double(const nlohmann::json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_report(const EnsembleReport& rep, OutputFormat fmt, std::ostream& os) {
    if (fmt == OutputFormat::Csv)
        emit_report_csv(rep, os);
    else
        emit_report_json(rep, os);
}

void emit_path(const PathRecord& rec, OutputFormat fmt, std::ostream& os) {
    if (fmt == OutputFormat::Csv)
        emit_path_csv(rec, os);
    else
        emit_path_json(rec, os);
}

void emit_regime(const RegimeReport& r, OutputFormat fmt, std::ostream& os) {
    if (fmt == OutputFormat::Json) {
        emit_regime_json(r, os);
        os << "\n";
        return;
    }
    os << "r0s=" << format_double(r.r0s) << "\n"
       << "cond_13i=" << (r.cond_13i ? "true" : "false") << "\n"
       << "cond_13ii=" << (r.cond_13ii ? "true" : "false") << "\n"
       << "conjecture_region=" << (r.conjecture_region ? "true" : "false") << "\n"
       << "persistence=" << (r.persistence ? "true" : "false") << "\n"
       << "theorem_case=" << to_string(r.theorem_case) << "\n"
       << "rate_bound=" << format_double(r.rate_bound) << "\n"
       << "average_bound=" << format_double(r.average_bound) << "\n"
       << "deterministic=" << (r.deterministic ? "true" : "false") << "\n"
       << "critical=" << (r.critical ? "true" : "false") << "\n";
}

void emit_verdicts(const std::vector<Verdict>& verdicts, OutputFormat fmt,
                   std::ostream& os) {
    if (fmt == OutputFormat::Json) {
        os << "[";
        for (std::size_t k = 0; k < verdicts.size(); ++k) {
            const Verdict& v = verdicts[k];
            os << (k ? "," : "") << "{\"check_name\":\"" << v.check_name << "\""
               << ",\"predicted\":" << json_double(v.predicted)
               << ",\"measured\":" << json_double(v.measured)
               << ",\"tolerance\":" << json_double(v.tolerance)
               << ",\"pass\":" << json_bool(v.pass)
               << ",\"detail\":\"" << v.detail << "\"}";
        }
        os << "]\n";
        return;
    }
    for (const Verdict& v : verdicts) {
        os << (v.pass ? "[PASS] " : "[FAIL] ") << v.check_name
           << " predicted=" << format_double(v.predicted)
           << " measured=" << format_double(v.measured)
           << " tolerance=" << format_double(v.tolerance) << " | " << v.detail
           << "\n";
    }
}

EnsembleReport parse_report_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    EnsembleReport rep;

    const nlohmann::json& rg = j.at("regime");
    rep.regime.r0s = node_double(rg.at("r0s"));
    rep.regime.cond_13i = rg.at("cond_13i").get<bool>();
    rep.regime.cond_13ii = rg.at("cond_13ii").get<bool>();
    rep.regime.conjecture_region = rg.at("conjecture_region").get<bool>();
    rep.regime.persistence = rg.at("persistence").get<bool>();
    rep.regime.theorem_case = rg.at("theorem_case").get<std::string>() == "CaseII"
                                  ? TheoremCase::CaseII
                                  : TheoremCase::CaseI;
    rep.regime.rate_bound = node_double(rg.at("rate_bound"));
    rep.regime.average_bound = node_double(rg.at("average_bound"));
    rep.regime.deterministic = rg.at("deterministic").get<bool>();
    rep.regime.critical = rg.at("critical").get<bool>();

    rep.n_paths = j.at("n_paths").get<std::uint32_t>();
    rep.extinct_fraction = node_double(j.at("extinct_fraction"));
    rep.slope_mean = node_double(j.at("slope_mean"));
    rep.slope_stderr = node_double(j.at("slope_stderr"));
    const nlohmann::json& q = j.at("slope_quantiles");
    if (!q.is_array() || q.size() != 5)
        throw std::runtime_error("report: slope_quantiles must have 5 entries");
    for (int k = 0; k < 5; ++k) rep.slope_quantiles[k] = node_double(q[k]);
    rep.avg_i_mean = node_double(j.at("avg_i_mean"));
    rep.mart_mean = node_double(j.at("mart_mean"));
    rep.mart_stderr = node_double(j.at("mart_stderr"));
    rep.max_identity_residual = node_double(j.at("max_identity_residual"));

    for (const nlohmann::json& e : j.at("per_path")) {
        PathSummary s;
        s.path_index = e.at("path_index").get<std::uint32_t>();
        s.seed = e.at("seed").get<std::uint64_t>();
        s.extinct = e.at("extinct").get<bool>();
        s.t_stop = node_double(e.at("t_stop"));
        s.slope_endpoint = node_double(e.at("slope_endpoint"));
        s.slope_regression = node_double(e.at("slope_regression"));
        s.avg_i = node_double(e.at("avg_i"));
        s.avg_i2 = node_double(e.at("avg_i2"));
        s.psi = node_double(e.at("psi"));
        s.mart_state_over_t = node_double(e.at("mart_state_over_t"));
        s.mart_log_over_t = node_double(e.at("mart_log_over_t"));
        s.mart_term = node_double(e.at("mart_term"));
        s.clamp_count = e.at("clamp_count").get<std::uint64_t>();
        s.n_steps = e.at("n_steps").get<std::uint64_t>();
        s.clamp_unreliable = e.at("clamp_unreliable").get<bool>();
        s.hoelder_margin = node_double(e.at("hoelder_margin"));
        s.min_hoelder_margin = node_double(e.at("min_hoelder_margin"));
        s.max_identity_residual = node_double(e.at("max_identity_residual"));
        s.decomp_residual = node_double(e.at("decomp_residual"));
        rep.per_path.push_back(s);
    }
    return rep;
}

}  // namespace sis
