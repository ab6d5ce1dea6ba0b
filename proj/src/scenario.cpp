#include "combcalc/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "combcalc/error.hpp"

namespace combcalc {

namespace {

struct Entry {
    int line = 0;
    int key_col = 1;
    std::string key;
    int value_col = 1;
    std::string value;
    char sep = '=';
};

struct Section {
    int line = 0;
    std::string kind;
    std::string name;
    std::vector<Entry> entries;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

int column_of(std::string_view line, std::string_view part) {
    return static_cast<int>(part.data() - line.data()) + 1;
}

std::vector<Section> split_sections(std::string_view text) {
    std::vector<Section> sections;
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view raw = text.substr(start, end - start);
        start = end + 1;
        ++number;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ScenarioError("section header must end with ']'", number, column_of(raw, line));
            const std::string_view inner = trim(line.substr(1, line.size() - 2));
            const auto space = inner.find_first_of(" \t");
            Section s;
            s.line = number;
            s.kind = std::string(inner.substr(0, space));
            if (space != std::string_view::npos) s.name = std::string(trim(inner.substr(space)));
            sections.push_back(std::move(s));
            continue;
        }
        if (sections.empty()) throw ScenarioError("entry outside any section", number, column_of(raw, line));
        const auto sep = line.find_first_of("=:");
        if (sep == std::string_view::npos) {
            throw ScenarioError("expected 'key = value' or 'index : expression'", number, column_of(raw, line));
        }
        const std::string_view key = trim(line.substr(0, sep));
        const std::string_view value = trim(line.substr(sep + 1));
        if (key.empty()) throw ScenarioError("missing key", number, column_of(raw, line));
        Entry e;
        e.line = number;
        e.key_col = column_of(raw, key);
        e.key = std::string(key);
        e.value_col = value.empty() ? column_of(raw, line) + static_cast<int>(line.size()) : column_of(raw, value);
        e.value = std::string(value);
        e.sep = line[sep];
        sections.back().entries.push_back(std::move(e));
    }
    return sections;
}

[[noreturn]] void fail_at(const Entry& e, const std::string& msg) { throw ScenarioError(msg, e.line, e.value_col); }

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::string current;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == ',') {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

double to_double(const Entry& e, const std::string& word) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
    if (ec != std::errc() || ptr != word.data() + word.size() || !std::isfinite(v)) {
        fail_at(e, "expected a number, got '" + word + "'");
    }
    return v;
}

int to_int(const Entry& e, const std::string& word) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
    if (ec != std::errc() || ptr != word.data() + word.size()) fail_at(e, "expected an integer, got '" + word + "'");
    return v;
}

Expr parse_at(const Entry& e, std::string_view text, const CombSpace& space) {
    try {
        return parse(text, space);
    } catch (const ParseError& err) {
        throw ScenarioError(err.what(), e.line, e.value_col + static_cast<int>(err.offset()));
    } catch (const Error& err) {
        fail_at(e, err.what());
    }
}

CoordLabel label_at(const Entry& e, std::string_view word, int col, const CombSpace& space) {
    Expr v;
    try {
        v = parse(word, space);
    } catch (const Error& err) {
        throw ScenarioError(err.what(), e.line, col);
    }
    if (v.kind() != ExprKind::Variable) throw ScenarioError("expected a coordinate name", e.line, col);
    return v.label();
}

CombSpace build_space(const Section& s) {
    std::optional<std::vector<int>> dims;
    std::optional<int> mhat;
    const Entry* dims_entry = nullptr;
    for (const Entry& e : s.entries) {
        if (e.key == "dims") {
            dims_entry = &e;
            std::vector<int> d;
            for (const auto& w : words(e.value)) d.push_back(to_int(e, w));
            dims = std::move(d);
        } else if (e.key == "mhat") {
            mhat = to_int(e, e.value);
        } else {
            throw ScenarioError("unknown key '" + e.key + "' in [space]", e.line, e.key_col);
        }
    }
    if (!dims) throw ScenarioError("[space] needs dims", s.line, 1);
    if (!mhat) mhat = dims->size() == 1 ? dims->front() : 1;
    try {
        return CombSpace(*dims, *mhat);
    } catch (const DimensionError& err) {
        fail_at(*dims_entry, err.what());
    }
}

DiffForm build_form(const Section& s, const CombSpace& space) {
    std::optional<int> degree;
    std::vector<std::pair<const Entry*, MultiIndex>> terms;
    for (const Entry& e : s.entries) {
        if (e.sep == '=' && e.key == "degree") {
            degree = to_int(e, e.value);
            continue;
        }
        if (e.sep != ':') throw ScenarioError("unknown key '" + e.key + "' in [form]", e.line, e.key_col);
        try {
            terms.emplace_back(&e, parse_multi_index(e.key, space));
        } catch (const Error& err) {
            throw ScenarioError(err.what(), e.line, e.key_col);
        }
    }
    if (!degree) throw ScenarioError("[form " + s.name + "] needs degree", s.line, 1);
    if (*degree < 0 || *degree > space.n()) throw ScenarioError("form degree outside [0, n]", s.line, 1);
    DiffForm form(space, *degree);
    for (const auto& [entry, index] : terms) {
        if (index.degree() != *degree) {
            throw ScenarioError("term degree differs from form degree", entry->line, entry->key_col);
        }
        form = add_forms(form, DiffForm::basis(space, index, parse_at(*entry, entry->value, space)));
    }
    return form;
}

std::map<int, std::pair<const Entry*, Expr>> component_lines(const Section& s, const CombSpace& space) {
    std::map<int, std::pair<const Entry*, Expr>> out;
    for (const Entry& e : s.entries) {
        if (e.sep != '=') throw ScenarioError("expected 'coordinate = expression'", e.line, e.key_col);
        const int pos = space.index_of(label_at(e, e.key, e.key_col, space));
        if (out.contains(pos)) throw ScenarioError("component given twice", e.line, e.key_col);
        out.emplace(pos, std::pair{&e, parse_at(e, e.value, space)});
    }
    return out;
}

VectorField build_field(const Section& s, const CombSpace& space) {
    std::map<int, Expr> comps;
    for (auto& [pos, entry] : component_lines(s, space)) comps.emplace(pos, entry.second);
    return VectorField(space, std::move(comps));
}

SmoothMap build_map(const Section& s, const CombSpace& space) {
    const auto given = component_lines(s, space);
    std::vector<Expr> comps;
    for (int i = 0; i < space.n(); ++i) {
        const auto it = given.find(i);
        comps.push_back(it == given.end() ? Expr::variable(space.label(i)) : it->second.second);
    }
    return SmoothMap(space, space, std::move(comps));
}

using Intervals = std::vector<std::optional<std::pair<double, double>>>;

std::pair<double, double> interval_words(const Entry& e, const std::vector<std::string>& w, std::size_t at) {
    if (at + 2 > w.size()) fail_at(e, "expected 'lo hi'");
    return {to_double(e, w[at]), to_double(e, w[at + 1])};
}

Box finish_box(const Entry& e, const CombSpace& space, const Intervals& given,
               const std::optional<std::pair<double, double>>& fallback) {
    std::vector<std::pair<double, double>> intervals;
    for (int i = 0; i < space.n(); ++i) {
        const auto& slot = given[static_cast<std::size_t>(i)];
        if (slot) {
            intervals.push_back(*slot);
        } else if (fallback) {
            intervals.push_back(*fallback);
        } else {
            fail_at(e, "no interval for " + space.label(i).name());
        }
    }
    try {
        return Box(space, std::move(intervals));
    } catch (const Error& err) {
        fail_at(e, err.what());
    }
}

Box build_domain(const Section& s, const CombSpace& space) {
    Intervals given(static_cast<std::size_t>(space.n()));
    std::optional<std::pair<double, double>> fallback;
    for (const Entry& e : s.entries) {
        const auto w = words(e.value);
        if (w.size() != 2) fail_at(e, "expected 'lo hi'");
        if (e.key == "default") {
            fallback = interval_words(e, w, 0);
        } else {
            given[static_cast<std::size_t>(space.index_of(label_at(e, e.key, e.key_col, space)))] = interval_words(e, w, 0);
        }
    }
    if (s.entries.empty()) throw ScenarioError("[domain " + s.name + "] is empty", s.line, 1);
    return finish_box(s.entries.back(), space, given, fallback);
}

// "x1 0 0.6, x2 0 1"
Intervals parse_box_spec(const Entry& e, const CombSpace& space) {
    Intervals given(static_cast<std::size_t>(space.n()));
    const auto w = words(e.value);
    if (w.size() % 3 != 0) fail_at(e, "expected 'coordinate lo hi' triples");
    for (std::size_t i = 0; i < w.size(); i += 3) {
        const int pos = space.index_of(label_at(e, w[i], e.value_col, space));
        given[static_cast<std::size_t>(pos)] = interval_words(e, w, i + 1);
    }
    return given;
}

PartitionOfUnity build_partition_section(const Section& s, const CombSpace& space) {
    std::optional<std::pair<double, double>> fallback;
    std::vector<std::string> order;
    std::map<std::string, std::pair<const Entry*, Intervals>> charts;
    std::map<std::string, std::pair<const Entry*, Intervals>> supports;
    for (const Entry& e : s.entries) {
        const auto key = words(e.key);
        if (key.size() == 1 && key[0] == "default") {
            const auto w = words(e.value);
            if (w.size() != 2) fail_at(e, "expected 'lo hi'");
            fallback = interval_words(e, w, 0);
        } else if (key.size() == 2 && key[0] == "chart") {
            if (charts.contains(key[1])) throw ScenarioError("chart '" + key[1] + "' declared twice", e.line, e.key_col);
            order.push_back(key[1]);
            charts.emplace(key[1], std::pair{&e, parse_box_spec(e, space)});
        } else if (key.size() == 2 && key[0] == "support") {
            if (supports.contains(key[1])) throw ScenarioError("support '" + key[1] + "' given twice", e.line, e.key_col);
            supports.emplace(key[1], std::pair{&e, parse_box_spec(e, space)});
        } else {
            throw ScenarioError("unknown key '" + e.key + "' in [partition]", e.line, e.key_col);
        }
    }
    if (order.empty()) throw ScenarioError("[partition " + s.name + "] declares no charts", s.line, 1);
    for (const auto& [name, support] : supports) {
        if (!charts.contains(name)) {
            throw ReferenceError("support for undeclared chart '" + name + "'", support.first->line, support.first->key_col);
        }
    }
    std::vector<Chart> chart_list;
    std::vector<Box> support_list;
    for (const std::string& name : order) {
        const auto& [entry, intervals] = charts.at(name);
        Box box = finish_box(*entry, space, intervals, fallback);
        const auto sup = supports.find(name);
        support_list.push_back(sup == supports.end() ? box
                                                     : finish_box(*sup->second.first, space, sup->second.second, fallback));
        chart_list.push_back(Chart::identity(name, std::move(box)));
    }
    try {
        return build_partition(Atlas(std::move(chart_list)), support_list);
    } catch (const Error& err) {
        throw ScenarioError(err.what(), s.line, 1);
    }
}

RunSpec build_run(const Section& s) {
    RunSpec r;
    r.line = s.line;
    bool have_theorem = false;
    std::optional<std::string> against;
    for (const Entry& e : s.entries) {
        if (e.sep != '=') throw ScenarioError("expected 'key = value'", e.line, e.key_col);
        if (e.key == "theorem") {
            have_theorem = true;
            if (e.value == "stokes") r.theorem = Theorem::Stokes;
            else if (e.value == "gauss") r.theorem = Theorem::Gauss;
            else if (e.value == "integral") r.theorem = Theorem::Integral;
            else if (e.value == "atlas") r.theorem = Theorem::Atlas;
            else fail_at(e, "theorem must be stokes, gauss, integral or atlas");
        } else if (e.key == "form") r.form = e.value;
        else if (e.key == "field") r.field = e.value;
        else if (e.key == "volume") r.volume = e.value;
        else if (e.key == "domain") r.domain = e.value;
        else if (e.key == "partition") r.partition = e.value;
        else if (e.key == "map") r.map = e.value;
        else if (e.key == "expect") r.expect = to_double(e, e.value);
        else if (e.key == "order") r.order = to_int(e, e.value);
        else if (e.key == "cells") r.cells = to_int(e, e.value);
        else if (e.key == "tol") r.tol.abs = r.tol.rel = to_double(e, e.value);
        else if (e.key == "tol_abs") r.tol.abs = to_double(e, e.value);
        else if (e.key == "tol_rel") r.tol.rel = to_double(e, e.value);
        else throw ScenarioError("unknown key '" + e.key + "' in [run]", e.line, e.key_col);
        if ((e.key == "order" || e.key == "cells") && to_int(e, e.value) < 1) fail_at(e, e.key + " must be >= 1");
    }
    if (!have_theorem) throw ScenarioError("[run] needs a theorem", s.line, 1);
    return r;
}

void require(bool ok, const std::string& what, const RunSpec& r) {
    if (!ok) throw ScenarioError("[run] needs " + what, r.line, 1);
}

template <typename Map>
void resolve(const Map& names, const std::string& name, const std::string& kind, const RunSpec& r) {
    if (!names.contains(name)) throw ReferenceError("undefined " + kind + " '" + name + "'", r.line, 1);
}

void check_references(const Scenario& s) {
    for (const RunSpec& r : s.runs) {
        switch (r.theorem) {
        case Theorem::Stokes:
            require(!r.form.empty() && !r.domain.empty(), "form and domain", r);
            resolve(s.forms, r.form, "form", r);
            resolve(s.domains, r.domain, "domain", r);
            break;
        case Theorem::Gauss:
            require(!r.field.empty() && !r.domain.empty(), "field and domain", r);
            resolve(s.fields, r.field, "field", r);
            if (!r.volume.empty()) resolve(s.forms, r.volume, "form", r);
            resolve(s.domains, r.domain, "domain", r);
            break;
        case Theorem::Integral:
            require(!r.form.empty() && !r.domain.empty() && r.expect.has_value(), "form, domain and expect", r);
            resolve(s.forms, r.form, "form", r);
            resolve(s.domains, r.domain, "domain", r);
            if (!r.map.empty()) resolve(s.maps, r.map, "map", r);
            break;
        case Theorem::Atlas:
            require(!r.form.empty() && !r.partition.empty() && r.expect.has_value(), "form, partition and expect", r);
            resolve(s.forms, r.form, "form", r);
            resolve(s.partitions, r.partition, "partition", r);
            break;
        }
    }
}

} // namespace

Scenario parse_scenario(std::string_view text, const std::string& default_name) {
    const std::vector<Section> sections = split_sections(text);
    std::string name = default_name;
    const Section* space_section = nullptr;
    for (const Section& s : sections) {
        if (s.kind == "space") {
            if (space_section) throw ScenarioError("second [space] section", s.line, 1);
            space_section = &s;
        } else if (s.kind == "scenario") {
            for (const Entry& e : s.entries) {
                if (e.key != "name") throw ScenarioError("unknown key '" + e.key + "' in [scenario]", e.line, e.key_col);
                name = e.value;
            }
        }
    }
    if (!space_section) throw ScenarioError("missing [space] section", 1, 1);

    Scenario out{name, build_space(*space_section), {}, {}, {}, {}, {}, {}};
    const CombSpace& space = out.space;
    std::set<std::string> names;
    for (const Section& s : sections) {
        if (s.kind == "space" || s.kind == "scenario") continue;
        if (s.kind == "run") {
            if (!s.name.empty()) throw ScenarioError("[run] takes no name", s.line, 1);
            out.runs.push_back(build_run(s));
            continue;
        }
        if (s.name.empty()) throw ScenarioError("[" + s.kind + "] needs a name", s.line, 1);
        if (!names.insert(s.name).second) throw ScenarioError("duplicate name '" + s.name + "'", s.line, 1);
        try {
            if (s.kind == "form") out.forms.emplace(s.name, build_form(s, space));
            else if (s.kind == "field") out.fields.emplace(s.name, build_field(s, space));
            else if (s.kind == "map") out.maps.emplace(s.name, build_map(s, space));
            else if (s.kind == "domain") out.domains.emplace(s.name, build_domain(s, space));
            else if (s.kind == "partition") out.partitions.emplace(s.name, build_partition_section(s, space));
            else throw ScenarioError("unknown section [" + s.kind + "]", s.line, 1);
        } catch (const ScenarioError&) {
            throw;
        } catch (const Error& err) {
            throw ScenarioError(err.what(), s.line, 1);
        }
    }
    check_references(out);
    return out;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot read " + path.string(), 0, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.stem().string());
}

namespace {

VerificationReport execute(const Scenario& s, const RunSpec& r, const RunOverrides& o) {
    IntegrationOptions options{o.order.value_or(r.order), r.cells, true};
    Tolerance tol = r.tol;
    if (o.tol) tol.abs = tol.rel = *o.tol;
    switch (r.theorem) {
    case Theorem::Stokes:
        return verify_stokes(s.forms.at(r.form), BoundedDomain(s.domains.at(r.domain)), options, tol);
    case Theorem::Gauss: {
        const DiffForm volume = r.volume.empty() ? DiffForm::volume(s.space) : s.forms.at(r.volume);
        return verify_gauss(s.fields.at(r.field), volume, BoundedDomain(s.domains.at(r.domain)), options, tol);
    }
    case Theorem::Integral: {
        const DiffForm& w = s.forms.at(r.form);
        const DiffForm integrand = r.map.empty() ? w : pullback(s.maps.at(r.map), w);
        return make_report(Theorem::Integral, integrate_box(integrand, s.domains.at(r.domain), options), *r.expect,
                           options.order, tol);
    }
    case Theorem::Atlas:
        return make_report(Theorem::Atlas, integrate_atlas(s.forms.at(r.form), s.partitions.at(r.partition), options),
                           *r.expect, options.order, tol);
    }
    throw Error("unknown run kind");
}

} // namespace

std::vector<RunResult> run(const Scenario& s, const RunOverrides& overrides) {
    std::vector<RunResult> results;
    for (std::size_t i = 0; i < s.runs.size(); ++i) {
        const RunSpec& r = s.runs[i];
        RunResult result;
        result.scenario = s.name;
        result.run_index = static_cast<int>(i);
        result.report.theorem = r.theorem;
        result.report.order = overrides.order.value_or(r.order);
        try {
            result.report = execute(s, r, overrides);
        } catch (const std::exception& err) {
            result.error = err.what();
        }
        results.push_back(std::move(result));
    }
    return results;
}

std::vector<std::string> check_sampled(const Scenario& s, std::uint64_t seed, int samples) {
    std::vector<std::string> problems;
    std::mt19937_64 rng(seed);
    for (const auto& [name, partition] : s.partitions) {
        std::vector<std::vector<double>> points;
        for (int k = 0; k < samples; ++k) {
            std::vector<double> p;
            for (const auto& [lo, hi] : partition.region().intervals()) {
                p.push_back(std::uniform_real_distribution<double>(lo, hi)(rng));
            }
            points.push_back(std::move(p));
        }
        try {
            const auto [deviation, min_weight] = partition.check(points);
            if (deviation > 1e-10) problems.push_back("partition " + name + ": weights do not sum to 1");
            if (min_weight < 0.0) problems.push_back("partition " + name + ": negative weight");
        } catch (const Error& err) {
            problems.push_back("partition " + name + ": " + err.what());
        }
    }
    return problems;
}

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

} // namespace

std::string emit_report(const std::vector<RunResult>& results, ReportFormat format) {
    if (format == ReportFormat::Json) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (const RunResult& r : results) {
            nlohmann::ordered_json j;
            j["scenario"] = r.scenario;
            j["run_index"] = r.run_index;
            j["theorem"] = to_string(r.report.theorem);
            if (r.error) {
                j["lhs"] = nullptr;
                j["rhs"] = nullptr;
                j["abs_err"] = nullptr;
                j["rel_err"] = nullptr;
            } else {
                j["lhs"] = r.report.lhs;
                j["rhs"] = r.report.rhs;
                j["abs_err"] = r.report.abs_err;
                j["rel_err"] = r.report.rel_err;
            }
            j["order"] = r.report.order;
            j["pass"] = r.ok();
            if (r.error) j["error"] = *r.error;
            out.push_back(std::move(j));
        }
        return out.dump(2) + "\n";
    }

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"scenario", "run", "theorem", "lhs", "rhs", "abs_err", "rel_err", "order", "status"});
    for (const RunResult& r : results) {
        if (r.error) {
            rows.push_back({r.scenario, std::to_string(r.run_index), to_string(r.report.theorem), "-", "-", "-", "-",
                            std::to_string(r.report.order), "ERROR: " + *r.error});
        } else {
            rows.push_back({r.scenario, std::to_string(r.run_index), to_string(r.report.theorem), sci(r.report.lhs),
                            sci(r.report.rhs), sci(r.report.abs_err), sci(r.report.rel_err),
                            std::to_string(r.report.order), r.report.pass ? "PASS" : "FAIL"});
        }
    }
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c + 1 < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += c + 1 < row.size() ? pad(row[c], width[c] + 2) : row[c];
        }
        out += '\n';
    }
    return out;
}

} // namespace combcalc
