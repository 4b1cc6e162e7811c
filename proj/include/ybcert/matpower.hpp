#pragma once

// Case ingestion: a subset of the MATPOWER case format (baseMVA, bus and
// branch matrices as bracketed numeric literals) and a canonical JSON
// network schema. Conversion maps the external pi-model convention onto
// series branches with complex taps plus explicit shunts.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ybcert/network.hpp"

namespace ybcert {

struct RawBus {
    long id = 0;
    int type = 1;
    double Pd = 0, Qd = 0, Gs = 0, Bs = 0;
};

struct RawBranch {
    long from_id = 0, to_id = 0;
    double r = 0, x = 0, b = 0;
    double tap_ratio = 0, phase_shift_deg = 0;
    int status = 1;
};

struct RawCase {
    std::string name;
    double base_mva = 100.0;
    std::vector<RawBus> buses;
    std::vector<RawBranch> branches;
};

namespace detail {

class McaseScanner {
public:
    explicit McaseScanner(std::string_view text) : text_(text) {}

    bool eof() const { return pos_ >= text_.size(); }
    int line() const { return line_; }
    int col() const { return col_; }

    void skip_blank() {
        while (!eof()) {
            const char c = text_[pos_];
            if (c == '%') {
                while (!eof() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    // Like skip_blank but stops at a newline (row separator inside a matrix).
    bool skip_blank_in_row() {
        while (!eof()) {
            const char c = text_[pos_];
            if (c == '\n') return true;
            if (c == '%') {
                while (!eof() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
                advance();
            } else {
                break;
            }
        }
        return false;
    }

    char peek() const { return eof() ? '\0' : text_[pos_]; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string identifier() {
        std::string id;
        while (!eof()) {
            const char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
                id.push_back(c);
                advance();
            } else {
                break;
            }
        }
        return id;
    }

    double number() {
        const int l = line_, c = col_;
        std::string tok;
        while (!eof()) {
            const char ch = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '+' || ch == '-' || ch == '.' || ch == 'e' ||
                ch == 'E') {
                tok.push_back(ch);
                advance();
            } else {
                break;
            }
        }
        if (tok.empty()) throw ParseError("expected a numeric literal", l, c);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) throw ParseError("malformed numeric token '" + tok + "'", l, c);
        return v;
    }

    void expect(char c) {
        if (peek() != c) throw ParseError(std::string("expected '") + c + "'", line_, col_);
        advance();
    }

    std::vector<std::vector<double>> matrix() {
        expect('[');
        std::vector<std::vector<double>> rows;
        std::vector<double> row;
        while (true) {
            const bool at_newline = skip_blank_in_row();
            if (eof()) throw ParseError("unterminated matrix", line_, col_);
            const char c = peek();
            if (at_newline) {
                if (!row.empty()) rows.push_back(std::move(row)), row.clear();
                advance();
                continue;
            }
            if (c == ';') {
                if (!row.empty()) rows.push_back(std::move(row)), row.clear();
                advance();
                continue;
            }
            if (c == ']') {
                if (!row.empty()) rows.push_back(std::move(row));
                advance();
                break;
            }
            row.push_back(number());
        }
        return rows;
    }

    void skip_string() {
        expect('\'');
        while (!eof() && peek() != '\'') advance();
        expect('\'');
    }

    void skip_to_eol() {
        while (!eof() && text_[pos_] != '\n') advance();
    }

    std::string rest_of_line_trimmed() {
        std::string s;
        while (!eof() && text_[pos_] != '\n' && text_[pos_] != '%') {
            s.push_back(text_[pos_]);
            advance();
        }
        skip_to_eol();
        const auto first = s.find_first_not_of(" \t\r");
        const auto last = s.find_last_not_of(" \t\r;");
        if (first == std::string::npos) return {};
        return s.substr(first, last - first + 1);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

inline std::string section_suffix(const std::string& id) {
    const auto dot = id.rfind('.');
    return dot == std::string::npos ? id : id.substr(dot + 1);
}

}  // namespace detail

/// Parse the mcase subset. Sections other than baseMVA/bus/branch are
/// scanned and discarded; anything that is not a numeric matrix literal, a
/// quoted string, or a scalar assignment is rejected.
inline RawCase parse_mcase(std::string_view text) {
    detail::McaseScanner sc(text);
    RawCase raw;
    bool saw_base = false, saw_bus = false, saw_branch = false;
    int bus_line = 0, branch_line = 0;

    while (true) {
        sc.skip_blank();
        if (sc.eof()) break;
        const int id_line = sc.line(), id_col = sc.col();
        const std::string id = sc.identifier();
        if (id.empty()) throw ParseError("unexpected character", sc.line(), sc.col());
        if (id == "function") {
            const std::string decl = sc.rest_of_line_trimmed();
            const auto eq = decl.rfind('=');
            std::string name = eq == std::string::npos ? decl : decl.substr(eq + 1);
            const auto first = name.find_first_not_of(" \t");
            if (first != std::string::npos) raw.name = name.substr(first);
            continue;
        }
        sc.skip_blank();
        sc.expect('=');
        sc.skip_blank();
        const std::string section = detail::section_suffix(id);
        if (sc.peek() == '[') {
            const int mat_line = sc.line();
            auto rows = sc.matrix();
            sc.skip_blank();
            if (sc.peek() == ';') sc.advance();
            if (section == "bus") {
                saw_bus = true;
                bus_line = mat_line;
                for (const auto& row : rows) {
                    if (row.size() < 6)
                        throw ParseError("bus row needs at least 6 columns (id type Pd Qd Gs Bs)", mat_line, 1);
                    raw.buses.push_back({static_cast<long>(row[0]), static_cast<int>(row[1]), row[2], row[3], row[4],
                                         row[5]});
                }
            } else if (section == "branch") {
                saw_branch = true;
                branch_line = mat_line;
                for (const auto& row : rows) {
                    if (row.size() < 11)
                        throw ParseError("branch row needs at least 11 columns (fbus tbus r x b rates ratio angle status)",
                                         mat_line, 1);
                    raw.branches.push_back({static_cast<long>(row[0]), static_cast<long>(row[1]), row[2], row[3],
                                            row[4], row[8], row[9], static_cast<int>(row[10])});
                }
            }
        } else if (sc.peek() == '\'') {
            sc.skip_string();
            sc.skip_blank();
            if (sc.peek() == ';') sc.advance();
        } else {
            const double value = sc.number();
            sc.skip_blank();
            if (sc.peek() == ';') sc.advance();
            if (section == "baseMVA") {
                raw.base_mva = value;
                saw_base = true;
            }
        }
        (void)id_line;
        (void)id_col;
    }
    if (!saw_base) throw ParseError("missing section 'baseMVA'");
    if (!saw_bus) throw ParseError("missing section 'bus'");
    if (!saw_branch) throw ParseError("missing section 'branch'");
    (void)bus_line;
    (void)branch_line;
    return raw;
}

/// Network plus the bookkeeping needed to report results against the
/// original case: dense index -> original bus id.
struct CaseNetwork {
    Network net;
    std::vector<long> bus_ids;
    std::string name;
    double base_mva = 100.0;
};

/// Map a parsed case onto the branch/tap/shunt representation:
///   y_series = ys / tau^2,  tap = tau * e^{j theta},  ys = 1/(r + jx),
/// line charging split as j*b/(2 tau^2) at the from side and j*b/2 at the to
/// side, bus shunts scaled by baseMVA. Out-of-service branches are dropped
/// and bus ids are re-indexed densely in order of appearance.
inline CaseNetwork to_network(const RawCase& raw) {
    std::unordered_map<long, int> index_of;
    std::vector<long> bus_ids;
    index_of.reserve(raw.buses.size());
    for (const RawBus& bus : raw.buses) {
        if (!index_of.emplace(bus.id, static_cast<int>(bus_ids.size())).second)
            throw ConversionError("duplicate bus id " + std::to_string(bus.id));
        bus_ids.push_back(bus.id);
    }

    std::vector<Branch> branches;
    std::vector<Shunt> shunts;
    for (const RawBranch& br : raw.branches) {
        if (br.status == 0) continue;
        const auto fi = index_of.find(br.from_id);
        const auto ti = index_of.find(br.to_id);
        if (fi == index_of.end() || ti == index_of.end())
            throw ConversionError("branch " + std::to_string(br.from_id) + "-" + std::to_string(br.to_id) +
                                  " references an unknown bus");
        if (br.r == 0.0 && br.x == 0.0)
            throw ConversionError("branch " + std::to_string(br.from_id) + "-" + std::to_string(br.to_id) +
                                  " has zero series impedance");
        const double tau = br.tap_ratio == 0.0 ? 1.0 : br.tap_ratio;
        const double theta = br.phase_shift_deg * std::numbers::pi / 180.0;
        const Complex ys = 1.0 / Complex{br.r, br.x};
        branches.push_back({fi->second, ti->second, ys / (tau * tau), tau * std::polar(1.0, theta)});
        if (br.b != 0.0) {
            shunts.push_back({fi->second, Complex{0.0, br.b / (2.0 * tau * tau)}});
            shunts.push_back({ti->second, Complex{0.0, br.b / 2.0}});
        }
    }
    for (const RawBus& bus : raw.buses) {
        if (bus.Gs != 0.0 || bus.Bs != 0.0)
            shunts.push_back({index_of[bus.id], Complex{bus.Gs, bus.Bs} / raw.base_mva});
    }
    return CaseNetwork{Network(static_cast<int>(raw.buses.size()), std::move(branches), std::move(shunts)),
                       std::move(bus_ids), raw.name, raw.base_mva};
}

/// Canonical JSON interchange schema, 0-based indices, exact doubles.
inline Network network_from_json(const nlohmann::json& j) {
    try {
        const int n = j.at("n_nodes").get<int>();
        std::vector<Branch> branches;
        std::vector<Shunt> shunts;
        for (const auto& jb : j.at("branches")) {
            Branch b;
            b.from = jb.at("from").get<int>();
            b.to = jb.at("to").get<int>();
            b.y_series = {jb.at("y").at(0).get<double>(), jb.at("y").at(1).get<double>()};
            const auto& tap = jb.at("tap");
            b.tap = {tap.at(0).get<double>(), tap.at(1).get<double>()};
            branches.push_back(b);
        }
        for (const auto& js : j.at("shunts"))
            shunts.push_back({js.at("node").get<int>(),
                              Complex{js.at("y").at(0).get<double>(), js.at("y").at(1).get<double>()}});
        return Network(n, std::move(branches), std::move(shunts));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("network json: ") + e.what());
    }
}

inline nlohmann::json network_to_json(const Network& net) {
    nlohmann::ordered_json j;
    j["n_nodes"] = net.node_count();
    j["branches"] = nlohmann::ordered_json::array();
    for (const Branch& b : net.branches())
        j["branches"].push_back({{"from", b.from},
                                 {"to", b.to},
                                 {"y", {b.y_series.real(), b.y_series.imag()}},
                                 {"tap", {b.tap.real(), b.tap.imag()}}});
    j["shunts"] = nlohmann::ordered_json::array();
    for (const Shunt& s : net.shunts()) j["shunts"].push_back({{"node", s.node}, {"y", {s.y.real(), s.y.imag()}}});
    return j;
}

inline CaseNetwork load_case_text(std::string_view text, std::string_view format, std::string name) {
    if (format == "mcase") {
        RawCase raw = parse_mcase(text);
        if (raw.name.empty()) raw.name = std::move(name);
        return to_network(raw);
    }
    if (format == "json") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("json: ") + e.what());
        }
        CaseNetwork cn{network_from_json(j), {}, std::move(name), 1.0};
        cn.bus_ids.resize(static_cast<std::size_t>(cn.net.node_count()));
        for (std::size_t i = 0; i < cn.bus_ids.size(); ++i) cn.bus_ids[i] = static_cast<long>(i);
        return cn;
    }
    throw ParseError("unknown case format '" + std::string(format) + "'");
}

inline CaseNetwork load_case_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string ext = path.extension().string();
    const std::string format = (ext == ".json") ? "json" : "mcase";
    return load_case_text(buffer.str(), format, path.stem().string());
}

}  // namespace ybcert
