#pragma once

#include <cctype>
#include <string>
#include <vector>

#include <json.hpp>

#include "robustmc/errors.hpp"

namespace robustmc {

// Small TOML-subset reader producing a JSON document: [table] headers
// (dotted allowed), key = value pairs with bare/quoted/dotted keys, basic
// strings, numbers, booleans, arrays and inline tables. Enough for run
// configuration files; not a full TOML implementation.
class TomlLite {
 public:
    static nlohmann::json parse(const std::string& text) {
        TomlLite p(text);
        return p.run();
    }

 private:
    explicit TomlLite(const std::string& text) : s_(text) {}

    nlohmann::json run() {
        nlohmann::json root = nlohmann::json::object();
        nlohmann::json* table = &root;
        while (true) {
            skip_ws_and_comments(true);
            if (eof()) break;
            if (peek() == '[') {
                get();
                std::vector<std::string> path = key_path();
                skip_ws();
                expect(']');
                table = &resolve(root, path);
            } else {
                std::vector<std::string> path = key_path();
                skip_ws();
                expect('=');
                skip_ws();
                nlohmann::json val = value();
                nlohmann::json* t = table;
                for (std::size_t i = 0; i + 1 < path.size(); ++i) t = &(*t)[path[i]];
                (*t)[path.back()] = std::move(val);
            }
            skip_line_tail();
        }
        return root;
    }

    nlohmann::json& resolve(nlohmann::json& root, const std::vector<std::string>& path) {
        nlohmann::json* t = &root;
        for (const std::string& k : path) t = &(*t)[k];
        if (!t->is_object() && !t->is_null()) fail("table header redefines a value");
        if (t->is_null()) *t = nlohmann::json::object();
        return *t;
    }

    std::vector<std::string> key_path() {
        std::vector<std::string> path;
        while (true) {
            skip_ws();
            path.push_back(key());
            skip_ws();
            if (!eof() && peek() == '.') {
                get();
                continue;
            }
            return path;
        }
    }

    std::string key() {
        if (eof()) fail("expected key");
        if (peek() == '"') return string_value();
        std::string k;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                          peek() == '-'))
            k += get();
        if (k.empty()) fail("expected key");
        return k;
    }

    nlohmann::json value() {
        if (eof()) fail("expected value");
        char c = peek();
        if (c == '"') return string_value();
        if (c == '[') {
            get();
            nlohmann::json arr = nlohmann::json::array();
            skip_ws_and_comments(true);
            if (!eof() && peek() == ']') {
                get();
                return arr;
            }
            while (true) {
                skip_ws_and_comments(true);
                arr.push_back(value());
                skip_ws_and_comments(true);
                if (!eof() && peek() == ',') {
                    get();
                    skip_ws_and_comments(true);
                    if (!eof() && peek() == ']') { get(); return arr; }
                    continue;
                }
                expect(']');
                return arr;
            }
        }
        if (c == '{') {
            get();
            nlohmann::json obj = nlohmann::json::object();
            skip_ws();
            if (!eof() && peek() == '}') {
                get();
                return obj;
            }
            while (true) {
                skip_ws();
                std::string k = key();
                skip_ws();
                expect('=');
                skip_ws();
                obj[k] = value();
                skip_ws();
                if (!eof() && peek() == ',') {
                    get();
                    continue;
                }
                expect('}');
                return obj;
            }
        }
        // bare token: bool or number
        std::string tok;
        while (!eof() && peek() != ',' && peek() != ']' && peek() != '}' && peek() != '#' &&
               peek() != '\n' && peek() != '\r' && peek() != ' ' && peek() != '\t')
            tok += get();
        if (tok == "true") return true;
        if (tok == "false") return false;
        if (tok.empty()) fail("expected value");
        std::string cleaned;
        for (char ch : tok)
            if (ch != '_') cleaned += ch;
        try {
            std::size_t used = 0;
            if (cleaned.find_first_of(".eE") == std::string::npos ||
                (cleaned.size() > 1 && cleaned.substr(0, 2) == "0x")) {
                long long v = std::stoll(cleaned, &used, 0);
                if (used == cleaned.size()) return v;
            }
            double d = std::stod(cleaned, &used);
            if (used == cleaned.size()) return d;
        } catch (...) {
        }
        fail("cannot parse value '" + tok + "'");
        return nullptr;
    }

    std::string string_value() {
        expect('"');
        std::string out;
        while (!eof() && peek() != '"') {
            char c = get();
            if (c == '\\') {
                if (eof()) fail("unterminated escape");
                char e = get();
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out += c;
            }
        }
        expect('"');
        return out;
    }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) get();
    }

    void skip_ws_and_comments(bool newlines) {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t') {
                get();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') get();
            } else if (newlines && (c == '\n' || c == '\r')) {
                if (get() == '\n') ++line_;
            } else {
                break;
            }
        }
    }

    void skip_line_tail() {
        skip_ws();
        if (!eof() && peek() == '#')
            while (!eof() && peek() != '\n') get();
        if (eof()) return;
        char c = get();
        if (c == '\r' && !eof() && peek() == '\n') c = get();
        if (c != '\n') fail("unexpected trailing characters");
        ++line_;
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    char get() { return s_[pos_++]; }

    void expect(char c) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        get();
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("toml: line " + std::to_string(line_) + ": " + msg);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

}  // namespace robustmc
