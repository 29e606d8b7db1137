#pragma once

#include <supersched/scenario.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace supersched {

// Malformed scenario text. what() reads "<origin>:<line>:<column>: <message>".
class ParseError : public std::runtime_error {
public:
    ParseError(std::string origin, std::size_t line, std::size_t column, const std::string& message);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// File could not be read or written.
class IoError : public std::runtime_error {
public:
    IoError(const std::filesystem::path& path, const std::string& what);

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

// Parses the `key = value` / `[section]` scenario format. Syntax errors throw
// ParseError; semantic problems are collected and thrown together as a
// ValidationError. Every default filled in and every capacity warning is
// recorded in Scenario::notes.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<text>");
Scenario load_scenario(const std::filesystem::path& path);

// Canonical text form; parse_scenario(format_scenario(s)) == s.
std::string format_scenario(const Scenario& sc);
void save_scenario(const Scenario& sc, const std::filesystem::path& path);

// Whole-file helpers that raise IoError naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace supersched
