"""
ChaosNDS - Exceptions
Hiérarchie des erreurs levées par la bibliothèque
"""


class ChaosError(Exception):
    """Erreur de base de la bibliothèque"""


class ConfigError(ChaosError):
    """Configuration d'expérience invalide ou JSON mal formé"""


class ParameterError(ChaosError):
    """Paramètre hors de son domaine de validité"""


class DomainViolationError(ChaosError):
    """Point hors du domaine de la famille d'applications"""


class CapacityError(ChaosError):
    """Horizon ou matérialisation au-delà de la capacité mémoire"""


class ExtensionError(ChaosError):
    """Suite d'indices trop courte et non prolongeable"""


class InsufficientSequenceError(ExtensionError):
    """Une famille ne fournit pas assez de termes pour un bloc"""


class BoundViolationError(ChaosError):
    """Suite non bornée ou hors de la borne déclarée"""


class ScheduleError(ChaosError):
    """Calendrier trop court pour l'horizon demandé"""


class ScheduleOverflowError(ScheduleError):
    """Terme du calendrier au-delà de la plage des entiers natifs"""


class ExpandingConditionError(ChaosError):
    """La famille emboîtée ne vérifie pas la condition d'expansion"""


class PreconditionError(ChaosError):
    """Hypothèse d'une construction non satisfaite"""


class CorruptGalleryError(ChaosError):
    """Métadonnées de la galerie incohérentes avec le système"""
