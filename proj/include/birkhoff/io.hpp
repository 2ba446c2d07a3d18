#pragma once

#include <string>

#include "birkhoff/types.hpp"

namespace birkhoff {

// Entry tokens: a 1-based candidate ("3") or an improper element ("2+4-1").
std::string format_entry(const Entry& e);
Entry parse_entry(const std::string& token, int n);

// Dataset text: one vote per line, entries separated by whitespace, '#' starts
// a comment, blank lines ignored. The candidate count is not part of the file.
Dataset parse_dataset(const std::string& text, int n);
std::string format_dataset(const Dataset& d);

// Compact tuple form of a proper vote, "(1,3,2)".
std::string vote_tuple(const Vote& v);
Vote parse_vote_tuple(const std::string& s, int n);

// Sufficient statistic JSON: {"n":..,"r":..,"N":..,"t":[[..],..]} with one
// inner array per position.
std::string suff_stat_to_json(const SuffStat& s);
SuffStat suff_stat_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
// Write-then-rename so readers never observe a partial file.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace birkhoff
