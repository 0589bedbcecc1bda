#pragma once

#include <initializer_list>
#include <string>
#include <utility>

#include "dyndb/database.hpp"
#include "dyndb/logic.hpp"

namespace support {

using namespace dyndb;

inline Schema graph_schema() { return parse_schema("(schema (E 2) (P 1))"); }

inline UpdateCmd ins(const std::string& rel, Tuple args) { return {UpdateKind::Insert, rel, std::move(args)}; }
inline UpdateCmd del(const std::string& rel, Tuple args) { return {UpdateKind::Delete, rel, std::move(args)}; }

inline Database db_with(const Schema& s, int d, std::initializer_list<std::pair<const char*, Tuple>> facts) {
    Database db(s, d);
    for (const auto& [r, t] : facts) db.apply(ins(r, t));
    return db;
}

inline Database path_db(const Schema& s, int d, Const n) {
    Database db(s, d);
    for (Const i = 1; i < n; ++i) db.apply(ins("E", {i, i + 1}));
    return db;
}

}  // namespace support
