#pragma once

// Line-oriented text format for automata.
//
//   # comment
//   states q1 q2 q3
//   alphabet a b
//   initial 1 0 0
//   accepting q3
//   matrix a
//   1/2 1 0        <- row = target state, column = source state
//   1/2 0 1/2
//   0   0 1/2
//   matrix b
//   ...
//
// Entries are integers, "p/q" fractions or finite decimals; they are stored
// exactly. Each matrix block holds |states| rows of |states| entries, so
// every column is a probability vector. `accepting` may be empty.

#include "pfa.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace pfacap {

namespace io_detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in{line};
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

inline std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

struct LineError : Error {
    LineError(std::size_t line, const std::string& msg) : Error("line " + std::to_string(line) + ": " + msg) {}
};

inline std::vector<Rational> parse_row(const std::vector<std::string>& tokens, std::size_t from, std::size_t line) {
    std::vector<Rational> row;
    for (std::size_t i = from; i < tokens.size(); ++i) {
        try {
            row.push_back(parse_rational(tokens[i]));
        } catch (const Error& e) {
            throw LineError(line, e.what());
        }
    }
    return row;
}

}  // namespace io_detail

inline Pfa parse_pfa(std::istream& in) {
    using io_detail::LineError;
    Pfa p;
    std::map<std::string, std::size_t> section_line;
    std::map<std::string, StochMatrix> matrices;
    std::map<std::string, std::size_t> matrix_line;
    std::vector<std::string> accepting_names;
    bool have_states = false, have_alphabet = false, have_initial = false, have_accepting = false;

    std::string current_matrix;
    std::size_t rows_read = 0, line_no = 0;
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        auto tokens = io_detail::split_ws(io_detail::strip_comment(raw));
        if (tokens.empty()) continue;
        const std::string& key = tokens[0];
        bool is_keyword = key == "states" || key == "alphabet" || key == "initial" || key == "accepting" ||
                          key == "matrix";
        if (!current_matrix.empty() && rows_read < p.num_states()) {
            if (is_keyword)
                throw LineError(line_no, "matrix " + current_matrix + " has " + std::to_string(rows_read) +
                                             " rows, expected " + std::to_string(p.num_states()));
            auto row = io_detail::parse_row(tokens, 0, line_no);
            if (row.size() != p.num_states())
                throw LineError(line_no, "matrix " + current_matrix + " row has " + std::to_string(row.size()) +
                                             " entries, expected " + std::to_string(p.num_states()));
            for (std::size_t c = 0; c < row.size(); ++c) matrices[current_matrix](rows_read, c) = row[c];
            ++rows_read;
            continue;
        }
        if (!is_keyword) throw LineError(line_no, "unexpected '" + key + "'");
        if (key != "matrix" && section_line.count(key)) throw LineError(line_no, "duplicate '" + key + "' line");
        section_line[key] = line_no;

        if (key == "states") {
            p.states.assign(tokens.begin() + 1, tokens.end());
            if (p.states.empty()) throw LineError(line_no, "no states declared");
            have_states = true;
        } else if (key == "alphabet") {
            p.alphabet.assign(tokens.begin() + 1, tokens.end());
            have_alphabet = true;
        } else if (key == "initial") {
            p.initial = io_detail::parse_row(tokens, 1, line_no);
            have_initial = true;
        } else if (key == "accepting") {
            accepting_names.assign(tokens.begin() + 1, tokens.end());
            have_accepting = true;
        } else {
            if (!have_states) throw LineError(line_no, "matrix before 'states'");
            if (tokens.size() != 2) throw LineError(line_no, "expected 'matrix <symbol>'");
            if (matrices.count(tokens[1])) throw LineError(line_no, "duplicate matrix for '" + tokens[1] + "'");
            current_matrix = tokens[1];
            matrices.emplace(current_matrix, StochMatrix{p.num_states()});
            matrix_line[current_matrix] = line_no;
            rows_read = 0;
        }
    }
    if (!current_matrix.empty() && rows_read < p.num_states())
        throw LineError(line_no, "matrix " + current_matrix + " is truncated");
    if (!have_states) throw LineError(line_no, "missing 'states'");
    if (!have_alphabet) throw LineError(line_no, "missing 'alphabet'");
    if (!have_initial) throw LineError(line_no, "missing 'initial'");
    if (!have_accepting) throw LineError(line_no, "missing 'accepting'");

    for (const auto& sym : p.alphabet) {
        auto it = matrices.find(sym);
        if (it == matrices.end()) throw LineError(section_line["alphabet"], "no matrix for symbol '" + sym + "'");
        p.matrices.push_back(it->second);
    }
    for (const auto& [sym, line] : matrix_line)
        if (!p.find_symbol(sym)) throw LineError(line, "matrix for symbol '" + sym + "' not in alphabet");
    for (const auto& name : accepting_names) {
        auto it = std::find(p.states.begin(), p.states.end(), name);
        if (it == p.states.end()) throw LineError(section_line["accepting"], "unknown accepting state '" + name + "'");
        p.accepting.push_back(static_cast<StateIndex>(it - p.states.begin()));
    }

    for (const auto& v : validate_pfa(p)) {
        std::size_t line = line_no;
        if (v.location.rfind("matrix ", 0) == 0 && matrix_line.count(v.location.substr(7)))
            line = matrix_line[v.location.substr(7)];
        else if (section_line.count(v.location))
            line = section_line[v.location];
        throw LineError(line, v.str());
    }
    return p;
}

inline Pfa parse_pfa(const std::string& text) {
    std::istringstream in{text};
    return parse_pfa(in);
}

inline Pfa load_pfa(const std::string& path) {
    std::ifstream in{path};
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return parse_pfa(in);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

inline void write_pfa(std::ostream& out, const Pfa& p) {
    auto join = [&](const std::vector<std::string>& xs) {
        for (const auto& x : xs) out << ' ' << x;
        out << '\n';
    };
    out << "states";
    join(p.states);
    out << "alphabet";
    join(p.alphabet);
    out << "initial";
    for (const auto& r : p.initial) out << ' ' << to_string(r);
    out << '\n';
    out << "accepting";
    for (auto s : p.accepting) out << ' ' << p.states.at(s);
    out << '\n';
    for (std::size_t k = 0; k < p.num_symbols(); ++k) {
        out << "matrix " << p.alphabet[k] << '\n';
        const auto& m = p.matrices[k];
        for (std::size_t r = 0; r < m.size(); ++r) {
            for (std::size_t c = 0; c < m.size(); ++c) out << (c ? " " : "") << to_string(m(r, c));
            out << '\n';
        }
    }
}

inline std::string format_pfa(const Pfa& p) {
    std::ostringstream out;
    write_pfa(out, p);
    return out.str();
}

}  // namespace pfacap
