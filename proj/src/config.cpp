#include "qsync/config.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace qsync {

using nlohmann::json;

namespace {

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, const std::string& base, std::optional<double> fallback = {}) {
    const json* v = find(obj, key);
    if (!v) {
        if (fallback) return *fallback;
        throw ConfigError(join(base, key), "required number missing");
    }
    if (!v->is_number()) throw ConfigError(join(base, key), "expected a number");
    return v->get<double>();
}

std::int64_t get_integer(const json& obj, const char* key, const std::string& base, std::int64_t fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(join(base, key), "expected an integer");
    return v->get<std::int64_t>();
}

std::string get_string(const json& obj, const char* key, const std::string& base, const std::string& fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(join(base, key), "expected a string");
    return v->get<std::string>();
}

bool get_bool(const json& obj, const char* key, const std::string& base, bool fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(join(base, key), "expected true or false");
    return v->get<bool>();
}

void require_object(const json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError(path, "expected an object");
}

template <typename F>
auto wrap_invalid(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

QubitParams qubit_from_json(const json& q, const std::string& path) {
    require_object(q, path);
    const double omega = get_number(q, "omega", path, 0.0);
    if (find(q, "m")) {
        if (find(q, "gamma_gain") || find(q, "gamma_damp"))
            throw ConfigError(path, "give either m or gamma_gain/gamma_damp, not both");
        const double m = get_number(q, "m", path);
        const double scale = get_number(q, "scale", path, 1.0);
        return wrap_invalid(join(path, "m"), [&] { return qubit_with_magnetization(m, omega, scale); });
    }
    return {omega, get_number(q, "gamma_gain", path), get_number(q, "gamma_damp", path)};
}

ComplexMatrix matrix_from_json(const json& m, const std::string& path) {
    if (!m.is_array() || m.empty()) throw ConfigError(path, "expected a non-empty array of rows");
    const auto d = static_cast<Eigen::Index>(m.size());
    ComplexMatrix out(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const json& row = m[static_cast<std::size_t>(i)];
        const std::string rp = index_path(path, static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) throw ConfigError(rp, "row length must equal row count");
        for (Eigen::Index k = 0; k < d; ++k) {
            const json& e = row[static_cast<std::size_t>(k)];
            const std::string ep = index_path(rp, static_cast<std::size_t>(k));
            if (e.is_number()) {
                out(i, k) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                out(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ConfigError(ep, "expected a number or [re, im]");
            }
        }
    }
    return out;
}

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> axis_values(const json& a, const std::string& path) {
    if (const json* v = find(a, "values")) {
        if (!v->is_array() || v->empty()) throw ConfigError(join(path, "values"), "expected a non-empty array");
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            if (!(*v)[i].is_number()) throw ConfigError(index_path(join(path, "values"), i), "expected a number");
            out.push_back((*v)[i].get<double>());
        }
        return out;
    }
    const double start = get_number(a, "start", path), stop = get_number(a, "stop", path);
    const std::int64_t count = get_integer(a, "count", path, 0);
    if (count < 1) throw ConfigError(join(path, "count"), "must be >= 1");
    if (count == 1 && start != stop) throw ConfigError(join(path, "count"), "a single point needs start == stop");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

struct ParamRef {
    enum class Kind { global, qubit, interaction } kind;
    std::size_t index = 0;
    std::string field;
};

ParamRef parse_param(const std::string& param, const std::string& path) {
    static const std::regex indexed(R"(^(qubits|interactions)\[(\d+)\]\.([a-z_]+)$)");
    std::smatch m;
    if (std::regex_match(param, m, indexed)) {
        const auto kind = m[1] == "qubits" ? ParamRef::Kind::qubit : ParamRef::Kind::interaction;
        const std::string field = m[3];
        if (kind == ParamRef::Kind::qubit && field != "omega" && field != "gamma_gain" && field != "gamma_damp" &&
            field != "m")
            throw ConfigError(path, "unknown qubit parameter '" + field + "'");
        if (kind == ParamRef::Kind::interaction && field != "ux" && field != "uy" && field != "uz")
            throw ConfigError(path, "unknown interaction parameter '" + field + "'");
        return {kind, std::stoul(m[2]), field};
    }
    if (param == "delta" || param == "u" || param == "ux" || param == "uy" || param == "uz")
        return {ParamRef::Kind::global, 0, param};
    throw ConfigError(path, "unknown sweep parameter '" + param + "'");
}

}  // namespace

Command parse_command(std::string_view name) {
    if (name == "evolve") return Command::evolve;
    if (name == "steady") return Command::steady;
    if (name == "sync") return Command::sync;
    if (name == "sweep") return Command::sweep;
    if (name == "verify-nogo") return Command::verify_nogo;
    if (name == "spin1-check") return Command::spin1_check;
    if (name == "algebra-check") return Command::algebra_check;
    if (name == "preset") return Command::preset;
    throw std::invalid_argument("unknown command '" + std::string(name) + "'");
}

std::string_view command_name(Command c) {
    switch (c) {
        case Command::evolve: return "evolve";
        case Command::steady: return "steady";
        case Command::sync: return "sync";
        case Command::sweep: return "sweep";
        case Command::verify_nogo: return "verify-nogo";
        case Command::spin1_check: return "spin1-check";
        case Command::algebra_check: return "algebra-check";
        case Command::preset: return "preset";
    }
    return "?";
}

void validate_sweep_param(const SystemSpec& spec, const std::string& param, const std::string& field_path) {
    const ParamRef ref = parse_param(param, field_path);
    switch (ref.kind) {
        case ParamRef::Kind::qubit:
            if (ref.index >= spec.size()) throw ConfigError(field_path, "qubit index out of range in '" + param + "'");
            break;
        case ParamRef::Kind::interaction:
            if (ref.index >= spec.interactions.size())
                throw ConfigError(field_path, "interaction index out of range in '" + param + "'");
            break;
        case ParamRef::Kind::global:
            if (ref.field == "delta" && spec.size() < 2) throw ConfigError(field_path, "delta needs two qubits");
            if (ref.field != "delta" && spec.interactions.empty())
                throw ConfigError(field_path, "'" + param + "' needs at least one interaction term");
            break;
    }
}

void apply_sweep_param(SystemSpec& spec, const std::string& param, double value) {
    const ParamRef ref = parse_param(param, "sweep");
    switch (ref.kind) {
        case ParamRef::Kind::qubit: {
            if (ref.index >= spec.size()) throw ConfigError("sweep", "qubit index out of range in '" + param + "'");
            QubitParams& q = spec.qubits[ref.index];
            if (ref.field == "omega") q.omega = value;
            else if (ref.field == "gamma_gain") q.gamma_gain = value;
            else if (ref.field == "gamma_damp") q.gamma_damp = value;
            else q = wrap_invalid("sweep", [&] { return qubit_with_magnetization(value, q.omega); });
            break;
        }
        case ParamRef::Kind::interaction: {
            if (ref.index >= spec.interactions.size())
                throw ConfigError("sweep", "interaction index out of range in '" + param + "'");
            InteractionTerm& t = spec.interactions[ref.index];
            (ref.field == "ux" ? t.ux : ref.field == "uy" ? t.uy : t.uz) = value;
            break;
        }
        case ParamRef::Kind::global:
            if (ref.field == "delta") {
                spec.qubits.at(0).omega = spec.qubits.at(1).omega + value;
                break;
            }
            for (auto& t : spec.interactions) {
                if (ref.field == "u") t.ux = t.uy = value;
                else if (ref.field == "ux") t.ux = value;
                else if (ref.field == "uy") t.uy = value;
                else t.uz = value;
            }
            break;
    }
}

json spec_to_json(const SystemSpec& spec) {
    json qubits = json::array();
    for (const auto& q : spec.qubits)
        qubits.push_back({{"omega", q.omega}, {"gamma_gain", q.gamma_gain}, {"gamma_damp", q.gamma_damp}});
    json inter = json::array();
    for (const auto& t : spec.interactions)
        inter.push_back({{"j", t.j}, {"k", t.k}, {"ux", t.ux}, {"uy", t.uy}, {"uz", t.uz}});
    return {{"qubits", qubits}, {"interactions", inter}, {"topology", std::string(topology_name(spec.topology))}};
}

SystemSpec spec_from_json(const json& j, const std::string& path) {
    require_object(j, path);
    const json* qs = find(j, "qubits");
    if (!qs || !qs->is_array() || qs->empty()) throw ConfigError(join(path, "qubits"), "expected a non-empty array");
    std::vector<QubitParams> qubits;
    for (std::size_t i = 0; i < qs->size(); ++i)
        qubits.push_back(qubit_from_json((*qs)[i], index_path(join(path, "qubits"), i)));

    const std::string topo_name = get_string(j, "topology", path, "custom");
    const Topology topo = wrap_invalid(join(path, "topology"), [&] { return parse_topology(topo_name); });

    SystemSpec spec;
    const json* coupling = find(j, "coupling");
    const json* inter = find(j, "interactions");
    if (coupling && inter) throw ConfigError(path, "give either coupling or interactions, not both");
    if (coupling) {
        const std::string cp = join(path, "coupling");
        require_object(*coupling, cp);
        if (topo == Topology::custom)
            throw ConfigError(join(path, "topology"), "coupling needs topology all_to_all or one_to_all");
        const double u = get_number(*coupling, "u", cp, 0.0);
        const bool has_u = find(*coupling, "u") != nullptr;
        spec = make_spec(std::move(qubits), get_number(*coupling, "ux", cp, u), get_number(*coupling, "uy", cp, u),
                         get_number(*coupling, "uz", cp, has_u ? u : 0.0), topo);
    } else {
        spec.qubits = std::move(qubits);
        spec.topology = topo;
        if (inter) {
            if (!inter->is_array()) throw ConfigError(join(path, "interactions"), "expected an array");
            for (std::size_t i = 0; i < inter->size(); ++i) {
                const json& t = (*inter)[i];
                const std::string tp = index_path(join(path, "interactions"), i);
                require_object(t, tp);
                const std::int64_t a = get_integer(t, "j", tp, -1), b = get_integer(t, "k", tp, -1);
                if (a < 0 || b < 0) throw ConfigError(tp, "j and k must be non-negative integers");
                spec.interactions.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b),
                                             get_number(t, "ux", tp, 0.0), get_number(t, "uy", tp, 0.0),
                                             get_number(t, "uz", tp, 0.0)});
            }
        }
    }
    try {
        spec.validate();
    } catch (const SpecError& e) {
        throw ConfigError(join(path, e.path()), e.what());
    }
    return spec;
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("syntax error: ") + e.what());
    }
    require_object(doc, "");
    if (get_bool(doc, "qsync_sidecar", "", false)) {
        const json* inner = find(doc, "config");
        if (!inner) throw ConfigError("config", "sidecar has no embedded config");
        doc = *inner;
        require_object(doc, "config");
    }

    RunConfig cfg;
    cfg.command = wrap_invalid("command", [&] { return parse_command(get_string(doc, "command", "", "steady")); });
    if (const json* p = find(doc, "preset")) {
        if (!p->is_string()) throw ConfigError("preset", "expected a string");
        cfg.preset = p->get<std::string>();
    }
    if (const json* o = find(doc, "overrides")) {
        require_object(*o, "overrides");
        cfg.overrides = *o;
    }
    if (const json* s = find(doc, "spec")) cfg.spec = spec_from_json(*s, "spec");

    if (const json* init = find(doc, "init")) {
        require_object(*init, "init");
        cfg.init.kind = wrap_invalid("init.kind", [&] { return parse_init_kind(get_string(*init, "kind", "init", "ghz")); });
        const std::int64_t seed = get_integer(*init, "seed", "init", 0);
        if (seed < 0) throw ConfigError("init.seed", "must be non-negative");
        cfg.init.seed = static_cast<std::uint64_t>(seed);
        const json* m = find(*init, "matrix");
        if (cfg.init.kind == StateInit::Kind::explicit_matrix) {
            if (!m) throw ConfigError("init.matrix", "explicit init requires a matrix");
            const ComplexMatrix mat = matrix_from_json(*m, "init.matrix");
            cfg.init.matrix = wrap_invalid("init.matrix", [&] { return DensityMatrix(mat); });
            if (cfg.spec && static_cast<std::size_t>(mat.rows()) != cfg.spec->dim())
                throw ConfigError("init.matrix", "dimension does not match spec");
        } else if (m) {
            throw ConfigError("init.matrix", "only allowed with kind \"explicit\"");
        }
    }

    const json empty = json::object();
    const json* params = find(doc, "params");
    if (params) require_object(*params, "params");
    const json& p = params ? *params : empty;
    cfg.t_end = get_number(p, "t_end", "params", cfg.t_end);
    cfg.samples = static_cast<int>(get_integer(p, "samples", "params", cfg.samples));
    cfg.log_time = get_bool(p, "log_time", "params", cfg.log_time);
    cfg.t_min = get_number(p, "t_min", "params", cfg.t_min);
    cfg.correlation_sums = get_bool(p, "correlation_sums", "params", cfg.correlation_sums);
    cfg.rtol = get_number(p, "rtol", "params", cfg.rtol);
    cfg.atol = get_number(p, "atol", "params", cfg.atol);
    cfg.expect = get_string(p, "expect", "params", cfg.expect);
    if (!(cfg.t_end >= 0.0)) throw ConfigError("params.t_end", "must be >= 0");
    if (cfg.samples < 1) throw ConfigError("params.samples", "must be >= 1");
    if (cfg.log_time && !(cfg.t_min > 0.0 && cfg.t_min < cfg.t_end))
        throw ConfigError("params.t_min", "log_time needs 0 < t_min < t_end");
    if (!(cfg.rtol > 0.0)) throw ConfigError("params.rtol", "must be > 0");
    if (!(cfg.atol > 0.0)) throw ConfigError("params.atol", "must be > 0");
    if (cfg.expect != "auto" && cfg.expect != "product" && cfg.expect != "correlated")
        throw ConfigError("params.expect", "must be auto, product or correlated");
    if (const json* m = find(p, "steady_method")) {
        if (!m->is_string()) throw ConfigError("params.steady_method", "expected a string");
        cfg.steady_method = wrap_invalid("params.steady_method", [&] { return parse_steady_method(m->get<std::string>()); });
    }
    if (find(p, "steady_tol")) {
        cfg.steady_tol = get_number(p, "steady_tol", "params");
        if (!(*cfg.steady_tol > 0.0)) throw ConfigError("params.steady_tol", "must be > 0");
    }

    if (const json* sw = find(doc, "sweep")) {
        require_object(*sw, "sweep");
        const json* axes = find(*sw, "axes");
        if (!axes || !axes->is_array() || axes->empty()) throw ConfigError("sweep.axes", "expected a non-empty array");
        for (std::size_t i = 0; i < axes->size(); ++i) {
            const std::string ap = index_path("sweep.axes", i);
            const json& a = (*axes)[i];
            require_object(a, ap);
            SweepAxis axis{get_string(a, "param", ap, ""), axis_values(a, ap)};
            if (axis.param.empty()) throw ConfigError(join(ap, "param"), "required string missing");
            if (cfg.spec) validate_sweep_param(*cfg.spec, axis.param, join(ap, "param"));
            cfg.axes.push_back(std::move(axis));
        }
        const std::int64_t mp = get_integer(*sw, "max_points", "sweep", -1);
        if (mp == 0 || mp < -1) throw ConfigError("sweep.max_points", "must be >= 1");
        if (mp > 0) cfg.max_points = static_cast<std::size_t>(mp);
    }

    if (const json* s1 = find(doc, "spin1")) {
        require_object(*s1, "spin1");
        auto pair = [&](const char* key, std::vector<double> fallback) {
            const json* v = find(*s1, key);
            if (!v) return fallback;
            if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
                throw ConfigError(join("spin1", key), "expected two numbers");
            return std::vector<double>{(*v)[0].get<double>(), (*v)[1].get<double>()};
        };
        cfg.spin1.omegas = pair("omegas", cfg.spin1.omegas);
        cfg.spin1.gamma_gain = pair("gamma_gain", cfg.spin1.gamma_gain);
        cfg.spin1.gamma_damp = pair("gamma_damp", cfg.spin1.gamma_damp);
        cfg.spin1.ux = get_number(*s1, "ux", "spin1", 0.0);
        cfg.spin1.uy = get_number(*s1, "uy", "spin1", 0.0);
        cfg.spin1.uz = get_number(*s1, "uz", "spin1", 0.0);
        cfg.spin1_scheme = wrap_invalid("spin1.scheme", [&] {
            return parse_dissipation_scheme(get_string(*s1, "scheme", "spin1", "side_to_center"));
        });
        try {
            cfg.spin1.validate();
        } catch (const SpecError& e) {
            throw ConfigError(join("spin1", e.path()), e.what());
        }
    }

    cfg.output_path = get_string(doc, "output", "", "");
    const std::int64_t w = get_integer(doc, "workers", "", 1);
    if (w < 1) throw ConfigError("workers", "must be >= 1");
    cfg.workers = static_cast<unsigned>(w);

    const bool needs_spec = cfg.command != Command::spin1_check && cfg.command != Command::preset && !cfg.preset;
    if (needs_spec && !cfg.spec) throw ConfigError("spec", "required for command " + std::string(command_name(cfg.command)));
    if (cfg.command == Command::sweep && !cfg.preset && cfg.axes.empty())
        throw ConfigError("sweep", "sweep command needs sweep.axes");
    if (cfg.command == Command::preset && !cfg.preset) throw ConfigError("preset", "preset command needs a preset name");
    if (cfg.spec && cfg.init.kind == StateInit::Kind::explicit_matrix &&
        static_cast<std::size_t>(cfg.init.matrix->dim()) != cfg.spec->dim())
        throw ConfigError("init.matrix", "dimension does not match spec");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json RunConfig::to_json() const {
    json j;
    j["command"] = std::string(command_name(command));
    if (preset) j["preset"] = *preset;
    if (!overrides.empty()) j["overrides"] = overrides;
    if (spec) j["spec"] = spec_to_json(*spec);
    json init_j{{"kind", std::string(init_kind_name(init.kind))}, {"seed", init.seed}};
    if (init.matrix) init_j["matrix"] = matrix_to_json(init.matrix->matrix());
    j["init"] = init_j;
    json p{{"t_end", t_end}, {"samples", samples}, {"log_time", log_time}, {"t_min", t_min},
           {"correlation_sums", correlation_sums}, {"rtol", rtol}, {"atol", atol}, {"expect", expect}};
    if (steady_method) p["steady_method"] = std::string(steady_method_name(*steady_method));
    if (steady_tol) p["steady_tol"] = *steady_tol;
    j["params"] = p;
    if (!axes.empty()) {
        json a = json::array();
        for (const auto& ax : axes) a.push_back({{"param", ax.param}, {"values", ax.values}});
        j["sweep"] = {{"axes", a}};
        if (max_points) j["sweep"]["max_points"] = *max_points;
    }
    if (command == Command::spin1_check)
        j["spin1"] = {{"omegas", spin1.omegas}, {"gamma_gain", spin1.gamma_gain}, {"gamma_damp", spin1.gamma_damp},
                      {"ux", spin1.ux}, {"uy", spin1.uy}, {"uz", spin1.uz},
                      {"scheme", std::string(dissipation_scheme_name(spin1_scheme))}};
    if (!output_path.empty()) j["output"] = output_path;
    j["workers"] = workers;
    return j;
}

}  // namespace qsync
