use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Scope {
    Direct = 1,
    Energy = 2,
    Other = 3,
}

impl Scope {
    pub const ALL: [Scope; 3] = [Scope::Direct, Scope::Energy, Scope::Other];

    pub fn number(self) -> u8 {
        self as u8
    }
}

impl From<Scope> for u8 {
    fn from(s: Scope) -> u8 {
        s.number()
    }
}

impl TryFrom<u8> for Scope {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, String> {
        Scope::ALL.get(usize::from(n).wrapping_sub(1)).copied().ok_or_else(|| format!("no scope {n}"))
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "scope {}", self.number())
    }
}

/// The 23 emission categories of the French regulatory GHG statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum RegulatoryCategory {
    StationaryCombustion = 1,
    MobileCombustion = 2,
    NonEnergyProcesses = 3,
    Fugitive = 4,
    Biomass = 5,
    PurchasedElectricity = 6,
    PurchasedHeat = 7,
    OtherEnergy = 8,
    PurchasedGoods = 9,
    FixedAssets = 10,
    Waste = 11,
    UpstreamFreight = 12,
    BusinessTravel = 13,
    UpstreamLeasedAssets = 14,
    Investments = 15,
    VisitorTravel = 16,
    DownstreamFreight = 17,
    UseOfSoldProducts = 18,
    EndOfLifeOfSoldProducts = 19,
    DownstreamFranchises = 20,
    DownstreamLeasedAssets = 21,
    Commuting = 22,
    OtherIndirect = 23,
}

use RegulatoryCategory as C;

impl RegulatoryCategory {
    pub const ALL: [RegulatoryCategory; 23] = [
        C::StationaryCombustion,
        C::MobileCombustion,
        C::NonEnergyProcesses,
        C::Fugitive,
        C::Biomass,
        C::PurchasedElectricity,
        C::PurchasedHeat,
        C::OtherEnergy,
        C::PurchasedGoods,
        C::FixedAssets,
        C::Waste,
        C::UpstreamFreight,
        C::BusinessTravel,
        C::UpstreamLeasedAssets,
        C::Investments,
        C::VisitorTravel,
        C::DownstreamFreight,
        C::UseOfSoldProducts,
        C::EndOfLifeOfSoldProducts,
        C::DownstreamFranchises,
        C::DownstreamLeasedAssets,
        C::Commuting,
        C::OtherIndirect,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get(usize::from(n).wrapping_sub(1)).copied()
    }

    /// 1-5 direct, 6-7 purchased energy, 8-23 other indirect.
    pub fn scope(self) -> Scope {
        match self.number() {
            1..=5 => Scope::Direct,
            6..=7 => Scope::Energy,
            _ => Scope::Other,
        }
    }

    pub fn label_en(self) -> &'static str {
        match self {
            C::StationaryCombustion => "Direct emissions from stationary combustion sources",
            C::MobileCombustion => "Direct emissions from mobile combustion sources",
            C::NonEnergyProcesses => "Direct emissions from non-energy processes",
            C::Fugitive => "Direct fugitive emissions",
            C::Biomass => "Emissions from biomass (soils, forests)",
            C::PurchasedElectricity => "Indirect emissions from purchased electricity",
            C::PurchasedHeat => "Indirect emissions from steam, heating or cooling",
            C::OtherEnergy => "Emissions linked to energy non included in the \"Direct emissions\" and \"Indirect emissions associated with energy\" categories",
            C::PurchasedGoods => "Purchased goods and services",
            C::FixedAssets => "Fixed assets",
            C::Waste => "Waste",
            C::UpstreamFreight => "Transportation of goods upstream",
            C::BusinessTravel => "Employee business travel",
            C::UpstreamLeasedAssets => "Leased assets upstream",
            C::Investments => "Investments",
            C::VisitorTravel => "Customer and visitor travel",
            C::DownstreamFreight => "Transportation of goods downstream",
            C::UseOfSoldProducts => "Use of sold products",
            C::EndOfLifeOfSoldProducts => "End of life of sold products",
            C::DownstreamFranchises => "Franchises downstream",
            C::DownstreamLeasedAssets => "Leased assets downstream",
            C::Commuting => "Employee commuting",
            C::OtherIndirect => "Other indirect emissions",
        }
    }

    pub fn label_fr(self) -> &'static str {
        match self {
            C::StationaryCombustion => "Émissions directes des sources fixes de combustion",
            C::MobileCombustion => "Émissions directes des sources mobiles à moteur thermique",
            C::NonEnergyProcesses => "Émissions directes des procédés hors énergie",
            C::Fugitive => "Émissions directes fugitives",
            C::Biomass => "Émissions issues de la biomasse (sols et forêts)",
            C::PurchasedElectricity => "Émissions indirectes liées à la consommation d’électricité",
            C::PurchasedHeat => "Émissions indirectes liées à la consommation de vapeur, chaleur ou froid",
            C::OtherEnergy => "Émissions liées à l’énergie non incluse dans les catégories « émissions directes de GES » et « émissions indirectes de GES associées à l’énergie »",
            C::PurchasedGoods => "Achats de produits ou services",
            C::FixedAssets => "Immobilisation des biens",
            C::Waste => "Déchets",
            C::UpstreamFreight => "Transport de marchandises amont",
            C::BusinessTravel => "Déplacements professionnels",
            C::UpstreamLeasedAssets => "Actifs en leasing amont",
            C::Investments => "Investissements",
            C::VisitorTravel => "Transports de visiteurs et de clients",
            C::DownstreamFreight => "Transport de marchandises aval",
            C::UseOfSoldProducts => "Utilisation de produits vendus",
            C::EndOfLifeOfSoldProducts => "Fin de vie des produits vendus",
            C::DownstreamFranchises => "Franchise aval",
            C::DownstreamLeasedAssets => "Leasing aval",
            C::Commuting => "Déplacements domicile travail",
            C::OtherIndirect => "Autres émissions indirectes",
        }
    }
}

impl From<RegulatoryCategory> for u8 {
    fn from(c: RegulatoryCategory) -> u8 {
        c.number()
    }
}

impl TryFrom<u8> for RegulatoryCategory {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, String> {
        Self::from_number(n).ok_or_else(|| format!("no regulatory category {n}"))
    }
}
