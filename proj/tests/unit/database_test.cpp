#include <gtest/gtest.h>

#include <set>

#include "generators.hpp"
#include "replay.hpp"
#include "texlayer/database.hpp"
#include "texlayer/error.hpp"

using namespace texlayer;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

TableSchema sites() {
  return {"sites",
          {{"period", ColumnType::kText},
           {"excavated", ColumnType::kDate},
           {"depth", ColumnType::kReal},
           {"finds", ColumnType::kInteger},
           {"photo", ColumnType::kBlobRef}}};
}

Row row(std::uint32_t id, FieldValue period, FieldValue date = {}, FieldValue depth = {},
        FieldValue finds = {}, FieldValue photo = {}) {
  return {id, {std::move(period), std::move(date), std::move(depth), std::move(finds),
               std::move(photo)}};
}

struct KeyLayer {
  TexturePool pool;
  InformationLayer layer;
  explicit KeyLayer(int side)
      : layer(create_layer(pool,
                           LayerSpec{.name = "keys",
                                     .kind = LayerKind::kDatabase,
                                     .element = ElementKind::kUInt32,
                                     .width = side,
                                     .height = side,
                                     .limits = {},
                                     .table = "sites"},
                           [](std::string_view) { return true; })) {}
  void put(std::uint32_t texel, std::uint32_t key, bool valid = true) {
    layer.data().set_value(texel, key);
    layer.mask().set_value(texel, valid);
  }
};

}  // namespace

TEST(Tables, CreateAndList) {
  TableStore store;
  store.create_table({"t", {{"period", ColumnType::kText}, {"excavated", ColumnType::kDate}}});
  store.create_table(sites());
  EXPECT_EQ(store.table_names(), (std::vector<std::string>{"t", "sites"}));
  EXPECT_TRUE(store.has_table("sites"));
  EXPECT_EQ(store.schema("sites"), sites());
  EXPECT_EQ(store.row_count("t"), 0u);
}

TEST(Tables, SchemaErrors) {
  TableStore store;
  store.create_table(sites());
  EXPECT_EQ(code_of([&] { store.create_table(sites()); }), ErrorCode::kDuplicateTable);
  EXPECT_EQ(code_of([&] {
              store.create_table({"x", {{"a", ColumnType::kText}, {"a", ColumnType::kReal}}});
            }),
            ErrorCode::kBadSchema);
  EXPECT_EQ(code_of([&] { store.create_table({"y", {{"id", ColumnType::kInteger}}}); }),
            ErrorCode::kBadSchema);
  EXPECT_EQ(code_of([&] { store.schema("nope"); }), ErrorCode::kUnknownTable);
  EXPECT_EQ(code_of([&] { store.upsert_row("nope", row(1, "x")); }), ErrorCode::kUnknownTable);
}

TEST(Tables, UpsertFetchDelete) {
  TableStore store;
  store.create_table(sites());
  const Row r = row(7, "Roman", "1998-04-12", 2.5, std::int64_t{14}, "photos/a.jpg");
  EXPECT_EQ(store.upsert_row("sites", r), r);
  EXPECT_EQ(store.get_row("sites", 7), r);
  const Row replaced = row(7, "Iberian");
  store.upsert_row("sites", replaced);
  EXPECT_EQ(store.get_row("sites", 7), replaced);
  EXPECT_EQ(store.row_count("sites"), 1u);
  EXPECT_FALSE(store.delete_row("sites", 3));
  EXPECT_TRUE(store.delete_row("sites", 7));
  EXPECT_FALSE(store.get_row("sites", 7));
}

TEST(Tables, RowRules) {
  TableStore store;
  store.create_table(sites());
  EXPECT_EQ(code_of([&] { store.upsert_row("sites", row(0, "x")); }), ErrorCode::kReservedKey);
  EXPECT_EQ(code_of([&] { store.upsert_row("sites", row(1, std::int64_t{3})); }),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of([&] { store.upsert_row("sites", row(1, "x", "1998-13-01")); }),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of([&] { store.upsert_row("sites", row(1, "x", {}, {}, 1.5)); }),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of([&] { store.upsert_row("sites", row(1, "x", {}, {}, {}, "../etc/passwd")); }),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of([&] { store.upsert_row("sites", row(1, "x", {}, {}, {}, "/abs/path")); }),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of([&] { store.upsert_row("sites", Row{1, {FieldValue{"x"}}}); }),
            ErrorCode::kSchemaViolation);
  // Integral reals are accepted in integer columns and integers widen to reals.
  const Row stored = store.upsert_row("sites", row(2, "x", "2000-02-29", std::int64_t{3}, 4.0));
  EXPECT_EQ(stored.values[2], FieldValue{3.0});
  EXPECT_EQ(stored.values[3], FieldValue{std::int64_t{4}});
  EXPECT_EQ(code_of([&] { store.upsert_row("sites", row(3, "x", "2001-02-29")); }),
            ErrorCode::kSchemaViolation);
}

TEST(Tables, RowsByIds) {
  TableStore store;
  store.create_table(sites());
  for (std::uint32_t id : {5u, 1u, 9u}) store.upsert_row("sites", row(id, std::to_string(id)));
  const std::vector<std::uint32_t> ids{9, 2, 5};
  const auto got = store.rows_by_ids("sites", ids);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].id, 5u);
  EXPECT_EQ(got[1].id, 9u);
  EXPECT_EQ(store.rows("sites").front().id, 1u);
}

TEST(RegionRows, Examples) {
  TableStore store;
  store.create_table(sites());
  store.upsert_row("sites", row(3, "three"));
  store.upsert_row("sites", row(7, "seven"));
  KeyLayer k(4);
  k.put(0, 3);
  k.put(1, 3);
  k.put(2, 7);
  k.put(3, 0);
  k.put(4, 9, false);  // masked out
  const std::vector<std::uint32_t> region{0, 1, 2, 3, 4};
  const RegionRows r = rows_for_layer_region(store, k.layer, region);
  EXPECT_EQ(r.keys, (std::vector<std::uint32_t>{3, 7}));
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[1].values[0], FieldValue{"seven"});
  EXPECT_TRUE(r.dangling.empty());

  EXPECT_TRUE(rows_for_layer_region(store, k.layer, std::vector<std::uint32_t>{}).keys.empty());

  store.delete_row("sites", 7);
  const RegionRows after = rows_for_layer_region(store, k.layer, region);
  EXPECT_EQ(after.rows.size(), 1u);
  EXPECT_EQ(after.dangling, (std::vector<std::uint32_t>{7}));
  EXPECT_EQ(rows_for_layer_region(store, k.layer, TexelRect{0, 0, 4, 1}).dangling, after.dangling);
}

TEST(RegionRows, ExhaustiveAgainstDistinctKeyScan) {
  gen::Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    TableStore store;
    store.create_table(sites());
    std::set<std::uint32_t> ids;
    for (std::uint32_t id = 1; id <= 12; ++id)
      if (gen::uniform(rng, 0, 1) < 0.6) {
        store.upsert_row("sites", row(id, "r"));
        ids.insert(id);
      }
    KeyLayer k(16);
    for (std::uint32_t t = 0; t < 256; ++t)
      k.put(t, static_cast<std::uint32_t>(gen::uniform_int(rng, 0, 14)), gen::uniform(rng, 0, 1) < 0.7);
    const TexelRect rect{gen::uniform_int(rng, 0, 8), gen::uniform_int(rng, 0, 8),
                         gen::uniform_int(rng, 0, 8), gen::uniform_int(rng, 0, 8)};
    std::set<std::uint32_t> keys;
    for (int y = rect.y; y < rect.y + rect.height; ++y)
      for (int x = rect.x; x < rect.x + rect.width; ++x) {
        const std::size_t i = static_cast<std::size_t>(y * 16 + x);
        const auto v = static_cast<std::uint32_t>(k.layer.data().value(i));
        if (k.layer.mask().value(i) != 0 && v != 0) keys.insert(v);
      }
    const RegionRows r = rows_for_layer_region(store, k.layer, rect);
    EXPECT_EQ(r.keys, std::vector<std::uint32_t>(keys.begin(), keys.end()));
    std::vector<std::uint32_t> dangling, found;
    for (std::uint32_t key : keys) (ids.count(key) ? found : dangling).push_back(key);
    EXPECT_EQ(r.dangling, dangling);
    ASSERT_EQ(r.rows.size(), found.size());
    for (std::size_t i = 0; i < found.size(); ++i) EXPECT_EQ(r.rows[i].id, found[i]);
  }
}

TEST(Csv, GoldenExport) {
  TableStore store;
  store.create_table(sites());
  store.upsert_row("sites", row(2, "Bronze, late", "1987-06-01", 0.75, std::int64_t{-3}, "img/2.png"));
  store.upsert_row("sites", row(1, "say \"hi\"\nnew line"));
  store.upsert_row("sites", row(4, ""));
  const std::string want =
      "id,period,excavated,depth,finds,photo\r\n"
      "1,\"say \"\"hi\"\"\nnew line\",,,,\r\n"
      "2,\"Bronze, late\",1987-06-01,0.75,-3,img/2.png\r\n"
      "4,\"\",,,,\r\n";
  EXPECT_EQ(export_csv(store, "sites"), want);
}

TEST(Csv, RoundTrip) {
  gen::Rng rng(8);
  TableStore a;
  a.create_table(sites());
  for (std::uint32_t id = 1; id < 60; ++id) {
    std::string text;
    const char alphabet[] = "ab ,\"\n\r;x";
    for (int i = gen::uniform_int(rng, 0, 8); i > 0; --i)
      text += alphabet[gen::uniform_int(rng, 0, 8)];
    a.upsert_row("sites",
                 row(id, gen::uniform(rng, 0, 1) < 0.2 ? FieldValue{} : FieldValue{text},
                     "2020-01-0" + std::to_string(1 + id % 9), gen::uniform(rng, -1e6, 1e6),
                     std::int64_t{gen::uniform_int(rng, -100000, 100000)},
                     gen::uniform(rng, 0, 1) < 0.5 ? FieldValue{} : FieldValue{"a/b c.tif"}));
  }
  const std::string csv = export_csv(a, "sites");
  TableStore b;
  b.create_table(sites());
  EXPECT_EQ(import_csv(b, "sites", csv), 59u);
  EXPECT_TRUE(a.same_content(b));
  EXPECT_EQ(export_csv(b, "sites"), csv);
}

TEST(Csv, ImportErrors) {
  TableStore store;
  store.create_table(sites());
  EXPECT_EQ(code_of([&] { import_csv(store, "sites", ""); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([&] { import_csv(store, "sites", "id,period\r\n1,x\r\n"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([&] {
              import_csv(store, "sites", "id,period,excavated,depth,finds,photo\n1,\"x,,,,\n");
            }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([&] {
              import_csv(store, "sites", "id,period,excavated,depth,finds,photo\n0,x,,,,\n");
            }),
            ErrorCode::kReservedKey);
  EXPECT_EQ(code_of([&] {
              import_csv(store, "sites", "id,period,excavated,depth,finds,photo\n1,x,,abc,,\n");
            }),
            ErrorCode::kParseError);
}

TEST(Persistence, SaveAndLoadFile) {
  const auto dir = replay::temp_dir("tables");
  TableStore a;
  a.create_table(sites());
  a.create_table({"empty", {}});
  a.upsert_row("sites", row(11, "x", "1999-12-31", 1.0, std::int64_t{2}, "p.jpg"));
  a.save_to(dir / "tables.sqlite");
  const TableStore b = TableStore::load_from(dir / "tables.sqlite");
  EXPECT_TRUE(a.same_content(b));
  EXPECT_EQ(b.table_names(), a.table_names());
  TableStore c = TableStore::open(dir / "live.sqlite");
  c.create_table(sites());
  c.upsert_row("sites", row(1, "y"));
  TableStore reopened = TableStore::open(dir / "live.sqlite");
  EXPECT_EQ(reopened.row_count("sites"), 1u);
  std::filesystem::remove_all(dir);
}
