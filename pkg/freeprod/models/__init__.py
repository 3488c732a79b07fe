from .group import ElementClass, FactorSpec, Presentation, Syllable, Word, classify, parse_word
from .hom import Hom
from .subcover import ChiReport, SubCover
