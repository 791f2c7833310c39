import pytest

from votechain.accounts import Address
from votechain.clock import ManualClock
from votechain.errors import DuplicateChannel, NoDeliveryChannel
from votechain.gateway import MockSmsTransport, OtpGateway, mask_phone

ADDR = Address(b"\x01" * 20)
OTHER = Address(b"\x02" * 20)


@pytest.fixture
def gateway():
    clock = ManualClock(1000)
    transport = MockSmsTransport()
    return OtpGateway(clock, transport), transport, clock


def test_mask_keeps_last_two_digits():
    assert mask_phone("6971234567") == "********67"
    assert mask_phone("12") == "**"
    assert mask_phone("1") == "*"
    assert mask_phone("") == ""


def test_channel_registration(gateway):
    gw, _, _ = gateway
    assert not gw.has_channel(ADDR)
    gw.register_channel(ADDR, "6971234567")
    assert gw.has_channel(ADDR)
    with pytest.raises(DuplicateChannel):
        gw.register_channel(ADDR, "6970000000")


def test_delivery_requires_channel(gateway):
    gw, _, _ = gateway
    with pytest.raises(NoDeliveryChannel):
        gw.deliver(ADDR, "123456")


def test_delivery_receipt_masks_phone(gateway):
    gw, transport, clock = gateway
    gw.register_channel(ADDR, "6971234567")
    clock.advance(7)
    receipt = gw.deliver(ADDR, "123456")
    assert receipt.address == ADDR
    assert receipt.masked_destination == "********67"
    assert receipt.delivered_at == 1007
    assert receipt.attempt == 1
    assert "6971234567" not in repr(receipt)
    assert transport.sent == [(ADDR, "6971234567", "123456")]


def test_attempt_counter_is_per_address(gateway):
    gw, _, _ = gateway
    gw.register_channel(ADDR, "690000001")
    gw.register_channel(OTHER, "690000002")
    assert gw.deliver(ADDR, "111111").attempt == 1
    assert gw.deliver(ADDR, "222222").attempt == 2
    assert gw.deliver(OTHER, "333333").attempt == 1


def test_inbox_helpers(gateway):
    gw, transport, _ = gateway
    gw.register_channel(ADDR, "690000001")
    gw.register_channel(OTHER, "690000002")
    assert transport.last_code(ADDR) is None
    gw.deliver(ADDR, "111111")
    gw.deliver(OTHER, "222222")
    gw.deliver(ADDR, "333333")
    assert transport.last_code(ADDR) == "333333"
    assert transport.codes_for(ADDR) == ["111111", "333333"]
    assert transport.all_codes() == ["111111", "222222", "333333"]
