#pragma once

// Text formats for channels, in the same style as the automaton format.
//
// Finite-state channel:
//   inputs 0:a 1:a 0:b 1:b
//   outputs 0 1
//   states s0 s1
//   initial s0
//   controls a b          # optional; marks a channel built from an automaton
//   output 0:a            # one row per previous state s', entries p(y | x, s')
//   1 0
//   1/2 1/2
//   transition 0:a        # |S| rows, row = next state, column = previous state
//   1 0
//   0 1
//
// Memoryless channel (rows are inputs, reals allowed):
//   channel 2 2
//   0.89 0.11
//   0.11 0.89

#include "fsmc.hpp"
#include "info.hpp"
#include "pfa_io.hpp"

#include <iomanip>

namespace pfacap {

inline Fsmc parse_fsmc(std::istream& in) {
    using io_detail::LineError;
    Fsmc ch;
    std::map<std::string, std::size_t> seen;
    std::map<std::string, std::vector<std::vector<Rational>>> outputs;
    std::map<std::string, StochMatrix> transitions;
    std::string initial_name;

    enum class Block { None, Output, Transition } block = Block::None;
    std::string current;
    std::size_t rows = 0, line_no = 0;
    std::string raw;
    auto expect_rows = [&] { return ch.num_states(); };
    while (std::getline(in, raw)) {
        ++line_no;
        auto tokens = io_detail::split_ws(io_detail::strip_comment(raw));
        if (tokens.empty()) continue;
        const std::string& key = tokens[0];
        const bool keyword = key == "inputs" || key == "outputs" || key == "states" || key == "initial" ||
                             key == "controls" || key == "output" || key == "transition";
        if (block != Block::None && rows < expect_rows()) {
            if (keyword) throw LineError(line_no, "block for '" + current + "' is truncated");
            auto row = io_detail::parse_row(tokens, 0, line_no);
            if (block == Block::Output) {
                if (row.size() != ch.num_outputs()) throw LineError(line_no, "output row needs one entry per output");
                outputs[current].push_back(std::move(row));
            } else {
                if (row.size() != ch.num_states()) throw LineError(line_no, "transition row needs one entry per state");
                for (std::size_t c = 0; c < row.size(); ++c) transitions[current](rows, c) = row[c];
            }
            ++rows;
            continue;
        }
        if (!keyword) throw LineError(line_no, "unexpected '" + key + "'");
        if (key == "output" || key == "transition") {
            if (ch.states.empty() || ch.outputs.empty()) throw LineError(line_no, "block before 'states'/'outputs'");
            if (tokens.size() != 2) throw LineError(line_no, "expected '" + key + " <input>'");
            current = tokens[1];
            rows = 0;
            if (key == "output") {
                if (outputs.count(current)) throw LineError(line_no, "duplicate output block");
                block = Block::Output;
                outputs[current];
            } else {
                if (transitions.count(current)) throw LineError(line_no, "duplicate transition block");
                block = Block::Transition;
                transitions.emplace(current, StochMatrix{ch.num_states()});
            }
            continue;
        }
        if (seen.count(key)) throw LineError(line_no, "duplicate '" + key + "' line");
        seen[key] = line_no;
        std::vector<std::string> rest(tokens.begin() + 1, tokens.end());
        if (key == "inputs") ch.inputs = rest;
        else if (key == "outputs") ch.outputs = rest;
        else if (key == "states") ch.states = rest;
        else if (key == "controls") ch.controls = rest;
        else {
            if (rest.size() != 1) throw LineError(line_no, "expected 'initial <state>'");
            initial_name = rest[0];
        }
    }
    if (block != Block::None && rows < expect_rows()) throw LineError(line_no, "block for '" + current + "' is truncated");
    for (const char* k : {"inputs", "outputs", "states", "initial"})
        if (!seen.count(k)) throw LineError(line_no, std::string{"missing '"} + k + "'");
    auto it = std::find(ch.states.begin(), ch.states.end(), initial_name);
    if (it == ch.states.end()) throw LineError(seen["initial"], "unknown initial state '" + initial_name + "'");
    ch.initial = static_cast<StateIndex>(it - ch.states.begin());
    for (const auto& x : ch.inputs) {
        if (!outputs.count(x)) throw LineError(line_no, "no output block for input '" + x + "'");
        if (!transitions.count(x)) throw LineError(line_no, "no transition block for input '" + x + "'");
        ch.output_law.push_back(outputs[x]);
        ch.state_law.push_back(transitions.at(x));
    }
    if (outputs.size() != ch.inputs.size() || transitions.size() != ch.inputs.size())
        throw LineError(line_no, "block for an undeclared input");
    if (!ch.controls.empty() && ch.inputs.size() != 2 * ch.controls.size())
        throw LineError(seen["controls"], "controls need exactly two inputs each");
    for (const auto& v : validate_fsmc(ch)) throw LineError(line_no, v.str());
    return ch;
}

inline Fsmc load_fsmc(const std::string& path) {
    std::ifstream in{path};
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return parse_fsmc(in);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

inline void write_fsmc(std::ostream& out, const Fsmc& ch) {
    auto line = [&](const char* key, const std::vector<std::string>& xs) {
        out << key;
        for (const auto& x : xs) out << ' ' << x;
        out << '\n';
    };
    line("inputs", ch.inputs);
    line("outputs", ch.outputs);
    line("states", ch.states);
    out << "initial " << ch.states.at(ch.initial) << '\n';
    if (!ch.controls.empty()) line("controls", ch.controls);
    for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
        out << "output " << ch.inputs[x] << '\n';
        for (const auto& row : ch.output_law[x]) {
            for (std::size_t y = 0; y < row.size(); ++y) out << (y ? " " : "") << to_string(row[y]);
            out << '\n';
        }
    }
    for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
        out << "transition " << ch.inputs[x] << '\n';
        const auto& m = ch.state_law[x];
        for (std::size_t r = 0; r < m.size(); ++r) {
            for (std::size_t c = 0; c < m.size(); ++c) out << (c ? " " : "") << to_string(m(r, c));
            out << '\n';
        }
    }
}

inline DiscreteChannel parse_channel(std::istream& in) {
    using io_detail::LineError;
    DiscreteChannel ch;
    std::size_t line_no = 0, rows = 0;
    bool header = false;
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        auto tokens = io_detail::split_ws(io_detail::strip_comment(raw));
        if (tokens.empty()) continue;
        if (!header) {
            if (tokens.size() != 3 || tokens[0] != "channel") throw LineError(line_no, "expected 'channel <nx> <ny>'");
            try {
                ch.nx = std::stoul(tokens[1]);
                ch.ny = std::stoul(tokens[2]);
            } catch (const std::exception&) {
                throw LineError(line_no, "alphabet sizes must be integers");
            }
            if (ch.nx == 0 || ch.ny == 0) throw LineError(line_no, "alphabet sizes must be positive");
            header = true;
            continue;
        }
        if (rows == ch.nx) throw LineError(line_no, "more rows than inputs");
        if (tokens.size() != ch.ny) throw LineError(line_no, "row needs " + std::to_string(ch.ny) + " entries");
        for (const auto& t : tokens) {
            try {
                ch.w.push_back(to_double(parse_rational(t)));
            } catch (const Error& e) {
                throw LineError(line_no, e.what());
            }
        }
        ++rows;
    }
    if (!header) throw LineError(line_no, "missing 'channel' header");
    if (rows != ch.nx) throw LineError(line_no, "expected " + std::to_string(ch.nx) + " rows");
    try {
        validate_channel(ch);
    } catch (const Error& e) {
        throw LineError(line_no, e.what());
    }
    return ch;
}

inline DiscreteChannel load_channel(const std::string& path) {
    std::ifstream in{path};
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return parse_channel(in);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

inline void write_channel(std::ostream& out, const DiscreteChannel& ch) {
    out << "channel " << ch.nx << ' ' << ch.ny << '\n' << std::setprecision(17);
    for (std::size_t x = 0; x < ch.nx; ++x) {
        for (std::size_t y = 0; y < ch.ny; ++y) out << (y ? " " : "") << ch(x, y);
        out << '\n';
    }
}

}  // namespace pfacap
