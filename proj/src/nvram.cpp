#include "supermag/nvram.hpp"

#include "supermag/error.hpp"

#include <nlohmann/json.hpp>

namespace supermag::ram {

using json = nlohmann::json;
using netlist::Direction;

namespace {

std::string idx(const char *prefix, std::size_t i) { return prefix + std::to_string(i); }

std::string cell_id(std::size_t word, std::size_t bit)
{
    return "c" + std::to_string(word) + "_" + std::to_string(bit);
}

} // namespace

void RamGeometry::validate() const
{
    if (words < 1 || bits < 1)
        throw InputError("RAM needs at least one word and one bit");
    if (bits > 64)
        throw InputError("RAM word width is limited to 64 bits");
}

netlist::Netlist build_nvram(const RamGeometry &geom)
{
    geom.validate();
    netlist::Netlist nl;
    nl.name = "nvram_" + std::to_string(geom.words) + "x" + std::to_string(geom.bits);
    for (std::size_t w = 0; w < geom.words; ++w) {
        nl.ports.push_back({idx("WWL", w), Direction::In});
        nl.ports.push_back({idx("RWL", w), Direction::In});
    }
    for (std::size_t b = 0; b < geom.bits; ++b)
        nl.ports.push_back({idx("D", b), Direction::In});
    nl.ports.push_back({"Wr_En", Direction::In});
    nl.ports.push_back({"Rd_En", Direction::In});
    for (std::size_t b = 0; b < geom.bits; ++b)
        nl.ports.push_back({idx("Q", b), Direction::Out});

    for (std::size_t w = 0; w < geom.words; ++w)
        for (std::size_t b = 0; b < geom.bits; ++b)
            nl.instances.push_back(
                {"ram_cell", cell_id(w, b), {{"WWL", idx("WWL", w)}, {"RWL", idx("RWL", w)}, {"BL", idx("BL", b)}}, {}, false});
    for (std::size_t b = 0; b < geom.bits; ++b) {
        nl.instances.push_back({"tristate", idx("wd", b), {{"A", idx("D", b)}, {"En", "Wr_En"}, {"Y", idx("BL", b)}}, {}, false});
        nl.instances.push_back({"latch", idx("rd", b), {{"D", idx("BL", b)}, {"En", "Rd_En"}, {"Q", idx("Q", b)}}, {}, false});
    }
    netlist::validate(nl);
    return nl;
}

std::vector<RamOp> parse_script(std::string_view text, const RamGeometry &geom)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw InputError(std::string("RAM script syntax error: ") + e.what());
    }
    auto ops = j.is_object() ? j.find("ops") : j.end();
    if (ops == j.end() || !ops->is_array())
        throw InputError("RAM script must be {\"ops\": [...]}");

    std::vector<RamOp> out;
    for (std::size_t i = 0; i < ops->size(); ++i) {
        const json &o = (*ops)[i];
        const std::string where = "RAM op " + std::to_string(i);
        if (!o.is_object() || !o.contains("op") || !o["op"].is_string())
            throw InputError(where + ": missing \"op\"");
        RamOp op;
        const std::string kind = o["op"].get<std::string>();
        if (kind == "write")
            op.kind = OpKind::Write;
        else if (kind == "read")
            op.kind = OpKind::Read;
        else if (kind == "power_cycle")
            op.kind = OpKind::PowerCycle;
        else
            throw InputError(where + ": unknown op \"" + kind + "\"");
        if (op.kind != OpKind::PowerCycle) {
            if (!o.contains("word") || !o["word"].is_number_unsigned())
                throw InputError(where + ": \"word\" must be a non-negative integer");
            op.word = o["word"].get<std::size_t>();
            if (op.word >= geom.words)
                throw InputError(where + ": word " + std::to_string(op.word) + " out of range");
        }
        if (op.kind == OpKind::Write) {
            if (!o.contains("data"))
                throw InputError(where + ": write needs \"data\"");
            const json &d = o["data"];
            if (d.is_string()) {
                const auto s = d.get<std::string>();
                if (s.size() != geom.bits)
                    throw InputError(where + ": data must have " + std::to_string(geom.bits) + " bits");
                for (char c : s) {
                    if (c != '0' && c != '1')
                        throw InputError(where + ": data bits must be 0/1");
                    op.data = (op.data << 1) | static_cast<std::uint64_t>(c == '1');
                }
            } else if (d.is_number_unsigned()) {
                op.data = d.get<std::uint64_t>();
                if (geom.bits < 64 && (op.data >> geom.bits) != 0)
                    throw InputError(where + ": data does not fit in " + std::to_string(geom.bits) + " bits");
            } else {
                throw InputError(where + ": data must be a bit string or integer");
            }
        }
        out.push_back(op);
    }
    return out;
}

RamState::RamState(RamGeometry geom)
    : geom_(geom), sim_((geom.validate(), build_nvram(geom)), sim::SimOptions{true, true})
{
    for (const std::string &in : build_nvram(geom_).inputs())
        current_[in] = Level::Z;
}

void RamState::check_word(std::size_t word) const
{
    if (word >= geom_.words)
        throw InputError("address " + std::to_string(word) + " out of range (words = " +
                         std::to_string(geom_.words) + ")");
}

void RamState::apply(const sim::StepInputs &inputs)
{
    for (const auto &[k, v] : inputs)
        current_[k] = v;
    if (current_["Wr_En"] == Level::One && current_["Rd_En"] == Level::One)
        warnings_.push_back("step " + std::to_string(sim_.waveform().steps.size()) +
                            ": Wr_En and Rd_En asserted together");
    sim_.step(inputs, true);
}

void RamState::write(std::size_t word, std::uint64_t data)
{
    check_word(word);
    if (geom_.bits < 64 && (data >> geom_.bits) != 0)
        throw InputError("data does not fit in " + std::to_string(geom_.bits) + " bits");

    apply({{idx("WWL", word), Level::One}, {"Wr_En", Level::One}});
    sim::StepInputs d;
    for (std::size_t b = 0; b < geom_.bits; ++b)
        d[idx("D", b)] = level_of((data >> b) & 1U);
    apply(d);
    sim::StepInputs lower{{idx("WWL", word), Level::Zero}, {"Wr_En", Level::Zero}};
    for (std::size_t b = 0; b < geom_.bits; ++b)
        lower[idx("D", b)] = Level::Z;
    apply(lower);
}

std::uint64_t RamState::read(std::size_t word)
{
    check_word(word);
    apply({{"Rd_En", Level::One}, {idx("RWL", word), Level::One}});
    apply({{idx("RWL", word), Level::Zero}, {"Rd_En", Level::Zero}});
    return read_buffer();
}

void RamState::power_cycle()
{
    sim::StepInputs off;
    for (auto &[k, v] : current_) {
        v = Level::Z;
        off[k] = Level::Z;
    }
    sim_.step(off, false);
    sim_.step({}, true);
}

bool RamState::stored_bit(std::size_t word, std::size_t bit) const
{
    check_word(word);
    if (bit >= geom_.bits)
        throw InputError("bit index out of range");
    const Circuit &c = sim_.elaborated().circuit;
    std::size_t sw = c.find_switch(cell_id(word, bit) + "/gamma");
    return sim_.states()[sw] == SwitchState::Closed;
}

std::uint64_t RamState::read_buffer() const
{
    std::uint64_t out = 0;
    for (std::size_t b = 0; b < geom_.bits; ++b)
        if (sim_.level(idx("Q", b)) == Level::One)
            out |= std::uint64_t{1} << b;
    return out;
}

RamState ram_write(RamState state, std::size_t word, std::uint64_t data)
{
    state.write(word, data);
    return state;
}

std::uint64_t ram_read(RamState &state, std::size_t word)
{
    return state.read(word);
}

} // namespace supermag::ram
