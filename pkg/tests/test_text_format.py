from fractions import Fraction

import pytest

from models.data_models import Dataset, FiniteDomain, PayoffSequence, SamplingDistribution, TargetFunction
from models.errors import TextFormatError
from database.text_format import (
    dumps_datasets, dumps_functions, dumps_loss, dumps_prior, format_rational, load_loss_file,
    load_sequences, loads_datasets, loads_functions, loads_loss, loads_prior, loads_sampling,
    loads_sequences, parse_rational, save_sequences
)
from engine.costs import cyclic_loss
from engine.enumeration import two_constant_prior


def test_rationals_are_always_num_over_den():
    assert format_rational(Fraction(1, 2)) == "1/2"
    assert format_rational(Fraction(3)) == "3/1"
    assert parse_rational(" 2/4 ") == Fraction(1, 2)
    for bad in ("0.5", "1", "1/0", "a/b"):
        with pytest.raises(TextFormatError):
            parse_rational(bad)


def test_function_records():
    f = TargetFunction(FiniteDomain(3, 2), (0, 1, 1))
    text = dumps_functions([f])
    assert text == "function,3,2,0,1,1\n"
    assert loads_functions("# header\n\n" + text) == [f]


def test_function_record_errors_carry_the_line():
    with pytest.raises(TextFormatError) as info:
        loads_functions("function,2,2,0,1\nfunction,2,2,0,5\n")
    assert info.value.line_no == 2
    with pytest.raises(TextFormatError):
        loads_functions("dataset,1/1,0,0\n")


def test_dataset_records():
    d = Dataset(((0, 1), (2, 0)), Fraction(1, 9))
    text = dumps_datasets([d])
    assert text == "dataset,1/9,0,1,2,0\n"
    assert loads_datasets(text) == [d]
    with pytest.raises(TextFormatError):
        loads_datasets("dataset,1/1,0,1,2\n")


def test_prior_records():
    prior = two_constant_prior(FiniteDomain(2, 2))
    text = dumps_prior(prior)
    assert text == "prior,1/2,2,2,0,0\nprior,1/2,2,2,1,1\n"
    assert loads_prior(text) == prior
    with pytest.raises(TextFormatError):
        loads_prior("prior,1/3,2,2,0,0\nprior,1/3,2,2,1,1\n")


def test_loss_records(tmp_path):
    loss = cyclic_loss(FiniteDomain(2, 3))
    text = dumps_loss(loss)
    assert text.splitlines()[0] == "loss,0/1,1/1,2/1"
    assert loads_loss(text).table == loss.table
    path = tmp_path / "cyclic.txt"
    path.write_text(text)
    loaded = load_loss_file(path)
    assert loaded.name == "file:cyclic.txt"
    assert loaded(0, 2) == 2


def test_sampling_record():
    assert loads_sampling("sampling,1/4,3/4\n") == SamplingDistribution((Fraction(1, 4), Fraction(3, 4)))
    with pytest.raises(TextFormatError):
        loads_sampling("sampling,1/4,1/4\n")
    with pytest.raises(TextFormatError):
        loads_sampling("sampling,1/2,1/2\nsampling,1/2,1/2\n")


def test_payoff_sequences(tmp_path):
    sequences = [PayoffSequence.from_string("0110"), PayoffSequence.from_string("1001")]
    path = tmp_path / "sequences.txt"
    save_sequences(path, sequences)
    assert path.read_text() == "0110\n1001\n"
    assert load_sequences(path) == sequences
    assert loads_sequences("# two experts\n01\n\n10\n") == [PayoffSequence((0, 1)), PayoffSequence((1, 0))]


def test_payoff_sequence_errors():
    with pytest.raises(TextFormatError) as info:
        loads_sequences("0101\n01x1\n")
    assert info.value.line_no == 2
