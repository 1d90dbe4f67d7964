#include <catch2/catch_amalgamated.hpp>

#include <semweave/annotation.hpp>
#include <semweave/store.hpp>

#include "support/fixture.hpp"

using namespace semweave;

namespace {
constexpr const char* kStock = "http://example.org/stock#";

void load_stock(KbStore& kb) {
    kb.load_turtle(read_fixture("stock.ttl"));
    kb.load_turtle(read_fixture("stock-individuals.ttl"));
}
}  // namespace

TEST_CASE("stock quote annotation parses into the expected shape") {
    auto a = parse_annotation(read_fixture("stockquote.json"));
    CHECK(a.service == "http://example.org/services#StockQuote");
    REQUIRE(a.input.nodes.size() == 2);
    CHECK(a.input.nodes[0].name == "ts");
    CHECK_FALSE(a.input.nodes[0].literal_node);
    CHECK(a.input.nodes[0].classification == std::string(kStock) + "TickerSymbol");
    CHECK(a.input.nodes[0].open());
    CHECK(a.input.nodes[1].name == "sym");
    CHECK(a.input.nodes[1].literal_node);
    CHECK(a.input.nodes[1].classification == vocab::kXsdString);
    REQUIRE(a.input.triples.size() == 1);
    CHECK(a.input.triples[0].predicate == std::string(kStock) + "tickerString");

    REQUIRE(a.output.nodes.size() == 4);
    const TemplateNode* cur = a.output.find("cur");
    REQUIRE(cur != nullptr);
    CHECK_FALSE(cur->open());
    REQUIRE(cur->constant.has_value());
    CHECK(cur->constant->value() == std::string(kStock) + "usd");
    CHECK(a.output.triples.size() == 3);

    CHECK(a.endpoint.kind == EndpointRef::Kind::Mock);
    CHECK(a.endpoint.name == "stockquote");
    CHECK(a.grounding.lowering.at("symbol") == "{sym}");
    CHECK(a.grounding.lifting.at("price") == "val");
}

TEST_CASE("shared and output-only node sets for the stock quote") {
    auto a = parse_annotation(read_fixture("stockquote.json"));
    CHECK(shared_nodes(a) == std::set<std::string>{"ts"});
    CHECK(output_only_nodes(a) == std::set<std::string>{"mv", "val"});
}

TEST_CASE("disjoint and identical models") {
    std::string base = R"({
      "service": "http://s/x",
      "endpoint": {"kind": "mock", "name": "m"},
      "inputModel": {
        "nodes": [{"name": "ary", "class": "http://e/C"}],
        "triples": []
      },
      "outputModel": %OUT%,
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    auto with_output = [&](const std::string& out) {
        std::string s = base;
        s.replace(s.find("%OUT%"), 5, out);
        return parse_annotation(s);
    };
    auto disjoint = with_output(
        R"({"nodes": [{"name": "b", "class": "http://e/C"}], "triples": []})");
    CHECK(shared_nodes(disjoint).empty());
    CHECK(output_only_nodes(disjoint) == std::set<std::string>{"b"});

    auto identical = with_output(
        R"({"nodes": [{"name": "ary", "class": "http://e/C"}], "triples": []})");
    CHECK(shared_nodes(identical) == std::set<std::string>{"ary"});
    CHECK(output_only_nodes(identical).empty());
}

TEST_CASE("echo service has no output-only nodes") {
    std::string text = R"({
      "service": "http://s/echo",
      "endpoint": {"kind": "mock", "name": "m"},
      "inputModel": {
        "nodes": [{"name": "x", "class": "http://e/C"}, {"name": "v", "datatype": "http://www.w3.org/2001/XMLSchema#string"}],
        "triples": [["x", "http://e/p", "v"]]
      },
      "outputModel": {
        "nodes": [{"name": "x", "class": "http://e/C"}, {"name": "v", "datatype": "http://www.w3.org/2001/XMLSchema#string"}],
        "triples": [["x", "http://e/p", "v"]]
      },
      "grounding": {"lowering": {"f": "{v}"}, "lifting": {}}
    })";
    auto a = parse_annotation(text);
    CHECK(output_only_nodes(a).empty());
}

TEST_CASE("annotation with empty output model parses and validate warns") {
    std::string text = R"({
      "service": "http://s/fire",
      "endpoint": {"kind": "mock", "name": "m"},
      "inputModel": {
        "nodes": [{"name": "ts", "class": "http://example.org/stock#TickerSymbol"}],
        "triples": []
      },
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    auto a = parse_annotation(text);
    CHECK(a.output.nodes.empty());
    KbStore kb;
    load_stock(kb);
    auto report = validate(a, kb);
    CHECK(report.ok());
    CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("triple referencing an undeclared node names it") {
    std::string text = R"({
      "service": "http://s/x",
      "endpoint": {"kind": "mock", "name": "m"},
      "inputModel": {
        "nodes": [{"name": "ts", "class": "http://e/C"}],
        "triples": [["ts", "http://e/p", "xx"]]
      },
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    try {
        parse_annotation(text);
        FAIL("expected AnnotationError");
    } catch (const AnnotationError& e) {
        CHECK(std::string(e.what()).find("xx") != std::string::npos);
    }
}

TEST_CASE("malformed JSON is an annotation syntax error") {
    CHECK_THROWS_AS(parse_annotation("{ not json"), AnnotationError);
}

TEST_CASE("node needs exactly one of class or datatype") {
    std::string both = R"({
      "service": "http://s/x", "endpoint": {"kind": "mock", "name": "m"},
      "inputModel": {"nodes": [{"name": "n", "class": "http://e/C", "datatype": "http://www.w3.org/2001/XMLSchema#string"}], "triples": []},
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    CHECK_THROWS_AS(parse_annotation(both), AnnotationError);
    std::string neither = R"({
      "service": "http://s/x", "endpoint": {"kind": "mock", "name": "m"},
      "inputModel": {"nodes": [{"name": "n"}], "triples": []},
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    CHECK_THROWS_AS(parse_annotation(neither), AnnotationError);
}

TEST_CASE("duplicate and invalid node names are rejected") {
    std::string dup = R"({
      "service": "http://s/x", "endpoint": {"kind": "mock", "name": "m"},
      "inputModel": {"nodes": [{"name": "n", "class": "http://e/C"}, {"name": "n", "class": "http://e/C"}], "triples": []},
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    CHECK_THROWS_AS(parse_annotation(dup), AnnotationError);
    std::string bad = R"({
      "service": "http://s/x", "endpoint": {"kind": "mock", "name": "m"},
      "inputModel": {"nodes": [{"name": "3x", "class": "http://e/C"}], "triples": []},
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    CHECK_THROWS_AS(parse_annotation(bad), AnnotationError);
}

TEST_CASE("shared node declarations must agree across models") {
    std::string text = R"({
      "service": "http://s/x", "endpoint": {"kind": "mock", "name": "m"},
      "inputModel": {"nodes": [{"name": "n", "class": "http://e/C"}], "triples": []},
      "outputModel": {"nodes": [{"name": "n", "class": "http://e/D"}], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    CHECK_THROWS_AS(parse_annotation(text), AnnotationError);
}

TEST_CASE("stock quote annotation validates cleanly against its vocabulary") {
    auto a = parse_annotation(read_fixture("stockquote.json"));
    KbStore kb;
    load_stock(kb);
    auto report = validate(a, kb);
    CHECK(report.errors.empty());
    CHECK(report.warnings.empty());
    CHECK(report.ok());
}

TEST_CASE("domain violation is reported") {
    KbStore kb;
    kb.load_turtle(read_fixture("stock.ttl"));
    kb.load_turtle(read_fixture("address.ttl"));
    std::string text = R"({
      "service": "http://s/x", "endpoint": {"kind": "mock", "name": "m"},
      "prefixes": {"": "http://example.org/stock#", "a": "http://example.org/address#"},
      "inputModel": {
        "nodes": [{"name": "p", "class": "a:Person"}, {"name": "mv", "class": ":MonetaryValue"}],
        "triples": [["p", ":hasPrice", "mv"]]
      },
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    auto report = validate(parse_annotation(text), kb);
    REQUIRE_FALSE(report.errors.empty());
    bool found = false;
    for (const auto& e : report.errors)
        if (e.find("domain violation") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("range violation on literal datatype mismatch") {
    KbStore kb;
    load_stock(kb);
    std::string text = R"({
      "service": "http://s/x", "endpoint": {"kind": "mock", "name": "m"},
      "prefixes": {"": "http://example.org/stock#", "xsd": "http://www.w3.org/2001/XMLSchema#"},
      "inputModel": {
        "nodes": [{"name": "ts", "class": ":TickerSymbol"}, {"name": "s", "datatype": "xsd:integer"}],
        "triples": [["ts", ":tickerString", "s"]]
      },
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    auto report = validate(parse_annotation(text), kb);
    bool found = false;
    for (const auto& e : report.errors)
        if (e.find("range violation") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("echo output warns about no produced triples") {
    KbStore kb;
    load_stock(kb);
    std::string text = R"({
      "service": "http://s/echo", "endpoint": {"kind": "mock", "name": "m"},
      "prefixes": {"": "http://example.org/stock#", "xsd": "http://www.w3.org/2001/XMLSchema#"},
      "inputModel": {
        "nodes": [{"name": "ts", "class": ":TickerSymbol"}, {"name": "s", "datatype": "xsd:string"}],
        "triples": [["ts", ":tickerString", "s"]]
      },
      "outputModel": {
        "nodes": [{"name": "ts", "class": ":TickerSymbol"}, {"name": "s", "datatype": "xsd:string"}],
        "triples": [["ts", ":tickerString", "s"]]
      },
      "grounding": {"lowering": {"f": "{s}"}, "lifting": {}}
    })";
    auto report = validate(parse_annotation(text), kb);
    CHECK(report.ok());
    bool found = false;
    for (const auto& w : report.warnings)
        if (w.find("no produced triples") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("validate flags unknown vocabulary and bad grounding") {
    KbStore kb;
    load_stock(kb);
    std::string text = R"({
      "service": "http://s/x", "endpoint": {"kind": "mock", "name": ""},
      "prefixes": {"": "http://example.org/stock#"},
      "inputModel": {
        "nodes": [{"name": "q", "class": ":NoSuchClass"}, {"name": "z", "datatype": "http://other/dt"}],
        "triples": [["q", ":noSuchProp", "z"]]
      },
      "outputModel": {
        "nodes": [{"name": "q", "class": ":NoSuchClass"}, {"name": "w", "datatype": ":NotADatatype"}],
        "triples": [["q", ":noSuchProp", "w"]]
      },
      "grounding": {"lowering": {"f": "{nope}"}, "lifting": {"r": "q", "r2": "missing"}}
    })";
    auto report = validate(parse_annotation(text), kb);
    auto has = [&](const std::string& frag) {
        for (const auto& e : report.errors)
            if (e.find(frag) != std::string::npos) return true;
        return false;
    };
    CHECK(has("unknown class"));
    CHECK(has("unknown datatype"));
    CHECK(has("unknown property"));
    CHECK(has("placeholder"));
    CHECK(has("mock endpoint name"));
    CHECK(has("names no output node"));
    CHECK(has("must be an open output-only literal node"));
    CHECK(has("'w' has no lifting entry"));
}

TEST_CASE("literal node as subject is an error") {
    KbStore kb;
    load_stock(kb);
    std::string text = R"({
      "service": "http://s/x", "endpoint": {"kind": "mock", "name": "m"},
      "prefixes": {"": "http://example.org/stock#", "xsd": "http://www.w3.org/2001/XMLSchema#"},
      "inputModel": {
        "nodes": [{"name": "s", "datatype": "xsd:string"}, {"name": "ts", "class": ":TickerSymbol"}],
        "triples": [["s", ":tickerString", "ts"]]
      },
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    auto report = validate(parse_annotation(text), kb);
    bool found = false;
    for (const auto& e : report.errors)
        if (e.find("used as subject") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("disconnected node in a multi-node model is an error") {
    KbStore kb;
    load_stock(kb);
    std::string text = R"({
      "service": "http://s/x", "endpoint": {"kind": "mock", "name": "m"},
      "prefixes": {"": "http://example.org/stock#", "xsd": "http://www.w3.org/2001/XMLSchema#"},
      "inputModel": {
        "nodes": [{"name": "ts", "class": ":TickerSymbol"}, {"name": "s", "datatype": "xsd:string"},
                  {"name": "lonely", "class": ":Currency"}],
        "triples": [["ts", ":tickerString", "s"]]
      },
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    auto report = validate(parse_annotation(text), kb);
    bool found = false;
    for (const auto& e : report.errors)
        if (e.find("lonely") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("object constant must be a known instance") {
    KbStore kb;
    kb.load_turtle(read_fixture("stock.ttl"));  // no usd individual
    auto a = parse_annotation(read_fixture("stockquote.json"));
    auto report = validate(a, kb);
    bool found = false;
    for (const auto& e : report.errors)
        if (e.find("not a known instance") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("literal constant must match its datatype") {
    KbStore kb;
    load_stock(kb);
    std::string text = R"({
      "service": "http://s/x", "endpoint": {"kind": "mock", "name": "m"},
      "prefixes": {"": "http://example.org/stock#", "xsd": "http://www.w3.org/2001/XMLSchema#"},
      "inputModel": {
        "nodes": [{"name": "mv", "class": ":MonetaryValue"}, {"name": "v", "datatype": "xsd:double", "constant": "abc"}],
        "triples": [["mv", ":numericalValue", "v"]]
      },
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    auto report = validate(parse_annotation(text), kb);
    bool found = false;
    for (const auto& e : report.errors)
        if (e.find("does not match datatype") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("http endpoint url must be absolute") {
    KbStore kb;
    load_stock(kb);
    std::string text = R"({
      "service": "http://s/x", "endpoint": {"kind": "http", "url": "/relative", "method": "POST"},
      "inputModel": {"nodes": [{"name": "ts", "class": "http://example.org/stock#TickerSymbol"}], "triples": []},
      "outputModel": {"nodes": [], "triples": []},
      "grounding": {"lowering": {}, "lifting": {}}
    })";
    auto report = validate(parse_annotation(text), kb);
    bool found = false;
    for (const auto& e : report.errors)
        if (e.find("absolute") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("serialization round-trips") {
    auto a = parse_annotation(read_fixture("stockquote.json"));
    auto b = parse_annotation(serialize_annotation(a));
    CHECK(a.same_content(b));
    auto p = parse_annotation(read_fixture("person-name.json"));
    CHECK(p.same_content(parse_annotation(serialize_annotation(p))));
}
