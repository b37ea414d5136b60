#include <gtest/gtest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "uatpc/errors.hpp"
#include "uatpc/io.hpp"

using namespace uatpc;

namespace {

NetworkInstance two_aps()
{
    return fixtures::instance(2, {4, 8, 12});
}

} // namespace

TEST(Measurements, JsonlLineMapsFields)
{
    auto r = parse_measurements_jsonl(R"({"ts":1620000000,"sta":"s1","serving":"ap1","pl":{"ap1":55.0,"ap2":70.0}})");
    ASSERT_EQ(r.records.size(), 1u);
    const auto& rec = r.records[0];
    EXPECT_EQ(rec.timestamp, 1620000000);
    EXPECT_EQ(rec.sta_id, "s1");
    EXPECT_EQ(rec.serving_ap, "ap1");
    EXPECT_EQ(rec.pl.size(), 2u);
    EXPECT_DOUBLE_EQ(rec.pl.at("ap2"), 70.0);
}

TEST(Measurements, ServingNotMeasuredIsRejected)
{
    auto r = parse_measurements_jsonl(R"({"ts":1,"sta":"s1","serving":"ap9","pl":{"ap1":55.0}})");
    EXPECT_TRUE(r.records.empty());
    ASSERT_EQ(r.rejects.size(), 1u);
    EXPECT_EQ(r.rejects[0].reason, "serving not measured");
    EXPECT_EQ(r.rejects[0].line, 1u);
}

TEST(Measurements, EmptyInput)
{
    auto r = parse_measurements_jsonl("");
    EXPECT_TRUE(r.records.empty());
    EXPECT_TRUE(r.rejects.empty());
    auto c = parse_measurements_csv("");
    EXPECT_TRUE(c.records.empty());
    EXPECT_TRUE(c.rejects.empty());
}

TEST(Measurements, UnknownApAndBadValuesRejectedWithAccounting)
{
    const auto inst = two_aps();
    const std::string text = R"({"ts":1,"sta":"s","serving":"ap0","pl":{"ap0":50,"ap1":60}}
{"ts":2,"sta":"s","serving":"ap0","pl":{"ap0":50,"apX":60}}
not json
{"ts":3,"sta":"s","serving":"ap0","pl":{"ap0":-4}}

{"ts":4,"sta":"s","serving":"ap0","pl":{}}
)";
    auto r = parse_measurements_jsonl(text, &inst);
    EXPECT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.lines_read, 5u);
    EXPECT_EQ(r.lines_accepted + r.rejects.size(), r.lines_read);
    EXPECT_NE(r.rejects[0].reason.find("unknown AP"), std::string::npos);
    EXPECT_EQ(r.rejects[1].line, 3u);
}

TEST(Measurements, CsvLongFormatGroupsRows)
{
    const std::string text = "ts,sta,serving,ap_id,pl_db\n"
                             "1,s1,ap0,ap0,50\n"
                             "1,s1,ap0,ap1,65\n"
                             "2,s1,ap1,ap1,55\n"
                             "3,s2,ap0,ap1,70\n"
                             "oops\n";
    auto r = parse_measurements_csv(text);
    ASSERT_EQ(r.records.size(), 2u);
    EXPECT_EQ(r.records[0].pl.size(), 2u);
    EXPECT_EQ(r.lines_read, 5u);
    EXPECT_EQ(r.lines_accepted, 3u);
    ASSERT_EQ(r.rejects.size(), 2u);
    EXPECT_EQ(r.rejects[0].reason, "serving not measured");
    EXPECT_EQ(r.rejects[0].line, 5u);
}

TEST(Measurements, JsonlRoundTrip)
{
    MeasurementRecord rec{42, "sta7", "ap1", {{"ap0", 71.25}, {"ap1", 48.5}}};
    auto r = parse_measurements_jsonl(measurement_to_jsonl(rec));
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0], rec);
}

TEST(Topology, DirectedReadingsAreAveraged)
{
    auto inst = parse_instance(R"({"aps":[{"id":"a","allowed_levels_dbm":[4,8],"channel":36},
                                          {"id":"b","allowed_levels_dbm":[4,8],"channel":36}],
                                   "ap_pl":[[0,60],[64,0]]})");
    EXPECT_DOUBLE_EQ(inst.ap_pl()(0, 1), 62.0);
    EXPECT_DOUBLE_EQ(inst.ap_pl()(1, 0), 62.0);
    EXPECT_TRUE(inst.overlaps(0, 1));
}

TEST(Topology, MissingDirectionsAndEmptyLevels)
{
    auto inst = parse_instance(R"({"aps":[{"id":"a","allowed_levels_dbm":[4],"channel":1},
                                          {"id":"b","allowed_levels_dbm":[4],"channel":2},
                                          {"id":"c","allowed_levels_dbm":[4],"channel":1}],
                                   "ap_pl":[[0,70,null],[null,0,null],[null,null,0]]})");
    EXPECT_DOUBLE_EQ(inst.ap_pl()(1, 0), 70.0);
    EXPECT_DOUBLE_EQ(inst.ap_pl()(0, 2), 100.0);
    EXPECT_FALSE(inst.overlaps(0, 1));
    EXPECT_THROW(parse_instance(R"({"aps":[{"id":"a","allowed_levels_dbm":[],"channel":1}],"ap_pl":[[0]]})"),
                 ValidationError);
    EXPECT_THROW(parse_instance(R"({"aps":[{"id":"a","allowed_levels_dbm":[1],"channel":1}],"ap_pl":[[0,1]]})"),
                 ValidationError);
    EXPECT_THROW(parse_instance("{"), ValidationError);
}

TEST(Topology, SymmetrizationIsIdempotent)
{
    auto inst = fixtures::instance(4, {4, 8});
    auto again = parse_instance(instance_to_json(inst));
    EXPECT_EQ(again, inst);
    EXPECT_EQ(parse_instance(instance_to_json(again)), inst);
}

TEST(Topology, ExplicitOverlapRoundTrips)
{
    auto base = fixtures::instance(3, {4, 8});
    std::vector<std::vector<bool>> ov{{true, false, true}, {false, true, false}, {true, false, true}};
    NetworkInstance inst(base.aps(), base.ap_pl(), ov);
    auto again = parse_instance(instance_to_json(inst));
    EXPECT_EQ(again, inst);
}

TEST(PowerConfigIo, RoundTripAndSchema)
{
    auto inst = fixtures::instance(3, {4, 8, 12});
    PowerConfig c{{4, 12, 8}};
    EXPECT_EQ(parse_power_config(inst, power_config_to_json(inst, c)), c);
    EXPECT_THROW(parse_power_config(inst, R"({"levels_dbm":{"ap0":4}})"), ValidationError);
    EXPECT_THROW(parse_power_config(inst, R"({"levels_dbm":{"ap0":4,"ap1":5,"ap2":8}})"), ValidationError);
}

TEST(RpCsv, RoundTripIsExact)
{
    auto inst = fixtures::instance(3, {4, 8});
    auto rps = fixtures::random_rps(5, 3, 9);
    const auto dir = std::filesystem::temp_directory_path() / "uatpc_io_test";
    save_rps_csv(dir / "rps.csv", inst, rps);
    auto back = load_rps_csv(dir / "rps.csv", inst);
    EXPECT_EQ(back.rp_pl, rps.rp_pl);
    EXPECT_EQ(back.origin_ids, rps.origin_ids);
    std::filesystem::remove_all(dir);
}

TEST(Files, MissingFileIsValidationError)
{
    EXPECT_THROW(read_file("/nonexistent/uatpc/file.json"), ValidationError);
    EXPECT_THROW(parse_format("xml"), ValidationError);
}
