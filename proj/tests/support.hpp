#pragma once

#include "edw/refresh.hpp"
#include "edw/resolver.hpp"
#include "edw/snapshot.hpp"
#include "edw/store.hpp"
#include "edw/warehouse_def.hpp"

#include <nlohmann/json.hpp>

#include <sstream>
#include <string>
#include <vector>

namespace support {

inline std::string fixture(std::string const &name)
{
    return edw::read_text_file(std::string(EDW_FIXTURES) + "/" + name);
}

inline edw::SourceSchema medical_source()
{
    return edw::parse_source_schema(fixture("medical.odl"));
}

inline edw::WarehouseDef medical_def()
{
    return edw::parse_warehouse_def(fixture("medical.edw"));
}

inline edw::Store medical_store()
{
    return edw::Store::create(fixture("medical.odl"), fixture("medical.edw"));
}

inline edw::Snapshot snapshot_from_file(edw::SourceSchema const &schema, std::string const &name, edw::Instant at)
{
    std::istringstream in(fixture(name));
    return edw::ingest_snapshot(schema, in, at);
}

inline edw::Snapshot snapshot_from(edw::SourceSchema const &schema, std::vector<nlohmann::json> const &records,
                                   edw::Instant at)
{
    return edw::ingest_snapshot(schema, std::span<nlohmann::json const>(records), at);
}

inline std::vector<nlohmann::json> records_from_file(std::string const &name)
{
    std::vector<nlohmann::json> out;
    std::istringstream in(fixture(name));
    std::string line;
    while (std::getline(in, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos)
            out.push_back(nlohmann::json::parse(line));
    return out;
}

inline nlohmann::json *find_record(std::vector<nlohmann::json> &records, std::string const &id)
{
    for (auto &r : records)
        if (r.at("id") == id)
            return &r;
    return nullptr;
}

} // namespace support
